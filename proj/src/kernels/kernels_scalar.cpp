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

// Portable reference kernels. Complex products are spelled out on the real
// and imaginary parts so the compiler never routes them through the
// NaN-recovering library multiply.

#include <algorithm>
#include <cmath>

#include "kernel_impl.hpp"

namespace qcm::kernels::detail {

namespace {

inline void cmul_add(double ar, double ai, const double* x, double* y) {
  y[0] += ar * x[0] - ai * x[1];
  y[1] += ar * x[1] + ai * x[0];
}

}  // namespace

void zaxpy_scalar(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const double ar = a.real(), ai = a.imag();
  const auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) cmul_add(ar, ai, xp + 2 * i, yp + 2 * i);
}

void zaxpby_scalar(std::size_t n, cplx a, const cplx* x, cplx b, cplx* y) {
  const double ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
  const auto* xp = reinterpret_cast<const double*>(x);
  auto* yp = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xp[2 * i], xi = xp[2 * i + 1];
    const double yr = yp[2 * i], yi = yp[2 * i + 1];
    yp[2 * i] = (ar * xr - ai * xi) + (br * yr - bi * yi);
    yp[2 * i + 1] = (ar * xi + ai * xr) + (br * yi + bi * yr);
  }
}

void zscal_scalar(std::size_t n, cplx a, cplx* x) {
  const double ar = a.real(), ai = a.imag();
  auto* xp = reinterpret_cast<double*>(x);
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = xp[2 * i], xi = xp[2 * i + 1];
    xp[2 * i] = ar * xr - ai * xi;
    xp[2 * i + 1] = ar * xi + ai * xr;
  }
}

void spmm_acc_scalar(const CsrView& a, const cplx* x, std::size_t ncols, cplx alpha, cplx* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    cplx* yrow = y + r * ncols;
    for (std::uint32_t e = a.row_ptr[r]; e < a.row_ptr[r + 1]; ++e) {
      const cplx v = alpha * a.val[e];
      zaxpy_scalar(ncols, v, x + static_cast<std::size_t>(a.col[e]) * ncols, yrow);
    }
  }
}

void adjoint_acc_scalar(std::size_t n, const cplx* x, cplx alpha, cplx* y) {
  constexpr std::size_t kBlock = 32;
  const double ar = alpha.real(), ai = alpha.imag();
  for (std::size_t rb = 0; rb < n; rb += kBlock) {
    const std::size_t re = std::min(n, rb + kBlock);
    for (std::size_t cb = 0; cb < n; cb += kBlock) {
      const std::size_t ce = std::min(n, cb + kBlock);
      for (std::size_t r = rb; r < re; ++r) {
        for (std::size_t c = cb; c < ce; ++c) {
          // y[c][r] += alpha * conj(x[r][c])
          const cplx v = x[r * n + c];
          const double vr = v.real(), vi = -v.imag();
          cplx& out = y[c * n + r];
          out = {out.real() + ar * vr - ai * vi, out.imag() + ar * vi + ai * vr};
        }
      }
    }
  }
}

double max_abs_diff_scalar(std::size_t n, const cplx* x, const cplx* y) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace qcm::kernels::detail
