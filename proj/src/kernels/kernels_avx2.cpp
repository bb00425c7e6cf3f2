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

// AVX2+FMA variants. One __m256d holds two interleaved complex values.
// Compiled with -mavx2 -mfma; only reachable through the dispatch table after
// a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kernel_impl.hpp"

namespace qcm::kernels::detail {

namespace {

// (ar + i ai) * x for two packed complex numbers.
inline __m256d cmul(__m256d ar, __m256d ai, __m256d x) {
  const __m256d xs = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(ar, x, _mm256_mul_pd(ai, xs));
}

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

constexpr std::size_t kMaxRegisterNnz = 8;

}  // namespace

void zaxpy_avx2(std::size_t n, cplx a, const cplx* x, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(dp(x + i));
    const __m256d x1 = _mm256_loadu_pd(dp(x + i + 2));
    const __m256d y0 = _mm256_loadu_pd(dp(y + i));
    const __m256d y1 = _mm256_loadu_pd(dp(y + i + 2));
    _mm256_storeu_pd(dp(y + i), _mm256_add_pd(y0, cmul(ar, ai, x0)));
    _mm256_storeu_pd(dp(y + i + 2), _mm256_add_pd(y1, cmul(ar, ai, x1)));
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(dp(x + i));
    const __m256d y0 = _mm256_loadu_pd(dp(y + i));
    _mm256_storeu_pd(dp(y + i), _mm256_add_pd(y0, cmul(ar, ai, x0)));
  }
  if (i < n) zaxpy_scalar(n - i, a, x + i, y + i);
}

void zaxpby_avx2(std::size_t n, cplx a, const cplx* x, cplx b, cplx* y) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  const __m256d br = _mm256_set1_pd(b.real());
  const __m256d bi = _mm256_set1_pd(b.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(dp(x + i));
    const __m256d y0 = _mm256_loadu_pd(dp(y + i));
    _mm256_storeu_pd(dp(y + i), _mm256_add_pd(cmul(ar, ai, x0), cmul(br, bi, y0)));
  }
  if (i < n) zaxpby_scalar(n - i, a, x + i, b, y + i);
}

void zscal_avx2(std::size_t n, cplx a, cplx* x) {
  const __m256d ar = _mm256_set1_pd(a.real());
  const __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(dp(x + i));
    _mm256_storeu_pd(dp(x + i), cmul(ar, ai, x0));
  }
  if (i < n) zscal_scalar(n - i, a, x + i);
}

void spmm_acc_avx2(const CsrView& a, const cplx* x, std::size_t ncols, cplx alpha, cplx* y) {
  __m256d cr[kMaxRegisterNnz];
  __m256d ci[kMaxRegisterNnz];
  const cplx* src[kMaxRegisterNnz];
  for (std::size_t r = 0; r < a.rows; ++r) {
    const std::uint32_t begin = a.row_ptr[r];
    const std::uint32_t end = a.row_ptr[r + 1];
    cplx* yrow = y + r * ncols;
    const std::size_t nnz = end - begin;
    if (nnz == 0) continue;
    if (nnz > kMaxRegisterNnz) {
      for (std::uint32_t e = begin; e < end; ++e) {
        zaxpy_avx2(ncols, alpha * a.val[e], x + static_cast<std::size_t>(a.col[e]) * ncols, yrow);
      }
      continue;
    }
    // Keep the output chunk in registers while all row entries accumulate into it.
    for (std::size_t e = 0; e < nnz; ++e) {
      const cplx v = alpha * a.val[begin + e];
      cr[e] = _mm256_set1_pd(v.real());
      ci[e] = _mm256_set1_pd(v.imag());
      src[e] = x + static_cast<std::size_t>(a.col[begin + e]) * ncols;
    }
    std::size_t j = 0;
    for (; j + 4 <= ncols; j += 4) {
      __m256d acc0 = _mm256_loadu_pd(dp(yrow + j));
      __m256d acc1 = _mm256_loadu_pd(dp(yrow + j + 2));
      for (std::size_t e = 0; e < nnz; ++e) {
        acc0 = _mm256_add_pd(acc0, cmul(cr[e], ci[e], _mm256_loadu_pd(dp(src[e] + j))));
        acc1 = _mm256_add_pd(acc1, cmul(cr[e], ci[e], _mm256_loadu_pd(dp(src[e] + j + 2))));
      }
      _mm256_storeu_pd(dp(yrow + j), acc0);
      _mm256_storeu_pd(dp(yrow + j + 2), acc1);
    }
    for (; j < ncols; ++j) {
      cplx acc = yrow[j];
      for (std::size_t e = 0; e < nnz; ++e) {
        const double vr = _mm256_cvtsd_f64(cr[e]), vi = _mm256_cvtsd_f64(ci[e]);
        const cplx s = src[e][j];
        acc = {acc.real() + vr * s.real() - vi * s.imag(), acc.imag() + vr * s.imag() + vi * s.real()};
      }
      yrow[j] = acc;
    }
  }
}

void adjoint_acc_avx2(std::size_t n, const cplx* x, cplx alpha, cplx* y) {
  constexpr std::size_t kBlock = 32;
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  const __m256d conj_mask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
  const std::size_t even = n & ~std::size_t{1};
  for (std::size_t rb = 0; rb < even; rb += kBlock) {
    const std::size_t re = std::min(even, rb + kBlock);
    for (std::size_t cb = 0; cb < even; cb += kBlock) {
      const std::size_t ce = std::min(even, cb + kBlock);
      for (std::size_t r = rb; r < re; r += 2) {
        for (std::size_t c = cb; c < ce; c += 2) {
          const __m256d top = _mm256_loadu_pd(dp(x + r * n + c));
          const __m256d bot = _mm256_loadu_pd(dp(x + (r + 1) * n + c));
          __m256d col0 = _mm256_permute2f128_pd(top, bot, 0x20);
          __m256d col1 = _mm256_permute2f128_pd(top, bot, 0x31);
          col0 = _mm256_xor_pd(col0, conj_mask);
          col1 = _mm256_xor_pd(col1, conj_mask);
          double* y0 = dp(y + c * n + r);
          double* y1 = dp(y + (c + 1) * n + r);
          _mm256_storeu_pd(y0, _mm256_add_pd(_mm256_loadu_pd(y0), cmul(ar, ai, col0)));
          _mm256_storeu_pd(y1, _mm256_add_pd(_mm256_loadu_pd(y1), cmul(ar, ai, col1)));
        }
      }
    }
  }
  if (even == n) return;
  // Odd dimension: last row and last column.
  const std::size_t last = n - 1;
  const double a_r = alpha.real(), a_i = alpha.imag();
  auto acc = [&](std::size_t r, std::size_t c) {
    const cplx v = x[r * n + c];
    const double vr = v.real(), vi = -v.imag();
    cplx& out = y[c * n + r];
    out = {out.real() + a_r * vr - a_i * vi, out.imag() + a_r * vi + a_i * vr};
  };
  for (std::size_t c = 0; c < n; ++c) acc(last, c);
  for (std::size_t r = 0; r < last; ++r) acc(r, last);
}

double max_abs_diff_avx2(std::size_t n, const cplx* x, const cplx* y) {
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(dp(x + i)), _mm256_loadu_pd(dp(y + i)));
    const __m256d sq = _mm256_mul_pd(d, d);
    best = _mm256_max_pd(best, _mm256_hadd_pd(sq, sq));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double m = std::sqrt(std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3])));
  for (; i < n; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace qcm::kernels::detail
