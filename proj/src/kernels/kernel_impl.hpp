// Copyright 2026 The qcm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qcm/kernels.hpp"

namespace qcm::kernels::detail {

void zaxpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y);
void zaxpby_scalar(std::size_t n, cplx a, const cplx* x, cplx b, cplx* y);
void zscal_scalar(std::size_t n, cplx a, cplx* x);
void spmm_acc_scalar(const CsrView& a, const cplx* x, std::size_t ncols, cplx alpha, cplx* y);
void adjoint_acc_scalar(std::size_t n, const cplx* x, cplx alpha, cplx* y);
double max_abs_diff_scalar(std::size_t n, const cplx* x, const cplx* y);

#ifdef QCM_HAVE_AVX2_KERNELS
void zaxpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y);
void zaxpby_avx2(std::size_t n, cplx a, const cplx* x, cplx b, cplx* y);
void zscal_avx2(std::size_t n, cplx a, cplx* x);
void spmm_acc_avx2(const CsrView& a, const cplx* x, std::size_t ncols, cplx alpha, cplx* y);
void adjoint_acc_avx2(std::size_t n, const cplx* x, cplx alpha, cplx* y);
double max_abs_diff_avx2(std::size_t n, const cplx* x, const cplx* y);
#endif

}  // namespace qcm::kernels::detail
