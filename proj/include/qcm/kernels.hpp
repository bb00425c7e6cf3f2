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

// Data-parallel complex kernels used by the operator algebra and the time
// steppers. Every kernel has a portable scalar reference and, where the CPU
// supports it, an AVX2+FMA variant. The active table is chosen once at
// startup from CPUID and can be overridden (tests pin both variants and
// compare them).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace qcm::kernels {

using cplx = std::complex<double>;

/// Read-only compressed-sparse-row view. `row_ptr` has rows+1 entries.
struct CsrView {
  std::size_t rows = 0;
  const std::uint32_t* row_ptr = nullptr;
  const std::uint32_t* col = nullptr;
  const cplx* val = nullptr;
};

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  /// y += a * x
  void (*zaxpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
  /// y = a * x + b * y
  void (*zaxpby)(std::size_t n, cplx a, const cplx* x, cplx b, cplx* y);
  /// x *= a
  void (*zscal)(std::size_t n, cplx a, cplx* x);
  /// Y += alpha * A * X, with X and Y row-major (A.rows x ncols for Y).
  void (*spmm_acc)(const CsrView& a, const cplx* x, std::size_t ncols, cplx alpha, cplx* y);
  /// Y += alpha * X^dagger for an n x n row-major X. X and Y must not alias.
  void (*adjoint_acc)(std::size_t n, const cplx* x, cplx alpha, cplx* y);
  /// max_i |x_i - y_i|
  double (*max_abs_diff)(std::size_t n, const cplx* x, const cplx* y);
};

const KernelTable& scalar_table();
/// Null when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

/// True when the running CPU reports AVX2 and FMA.
bool cpu_has_avx2();

/// Tables usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

/// The table used by the library. Defaults to the widest supported ISA.
const KernelTable& active();

/// Pin the active table; throws DomainError if the ISA is unavailable here.
void select(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace qcm::kernels
