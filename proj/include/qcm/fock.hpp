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

// Sparse operator algebra on a truncated two-mode Fock space
// span{e_{n,m} : 0 <= n <= n_max, 0 <= m <= m_max}. Mode "a" is indexed by n
// (subharmonic), mode "b" by m (pump). Flat index = n * (m_max + 1) + m.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qcm/kernels.hpp"

namespace qcm {

using cplx = std::complex<double>;

class TruncatedSpace {
 public:
  TruncatedSpace() = default;
  TruncatedSpace(int n_max, int m_max);

  int n_max() const { return n_max_; }
  int m_max() const { return m_max_; }
  std::size_t dim() const {
    return static_cast<std::size_t>(n_max_ + 1) * static_cast<std::size_t>(m_max_ + 1);
  }

  std::size_t index(int n, int m) const;
  std::pair<int, int> levels(std::size_t flat) const;
  bool contains(int n, int m) const { return n >= 0 && m >= 0 && n <= n_max_ && m <= m_max_; }

  friend bool operator==(const TruncatedSpace&, const TruncatedSpace&) = default;

 private:
  int n_max_ = 0;
  int m_max_ = 0;
};

using StateVector = std::vector<cplx>;

StateVector basis_vector(const TruncatedSpace& space, int n, int m);

/// Dense square complex matrix in row-major order; the representation of
/// density operators and of the propagated trace-class operator.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static DenseMatrix identity(std::size_t dim);
  static DenseMatrix projector(const StateVector& psi);  // |psi><psi|

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return data_.size(); }
  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::span<cplx> values() { return data_; }
  std::span<const cplx> values() const { return data_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  cplx trace() const;
  DenseMatrix adjoint() const;
  /// max_{r,c} |X_rc - conj(X_cr)|
  double hermiticity_deviation() const;
  double max_abs() const;
  void set_zero();

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(cplx s);

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

using DensityOperator = DenseMatrix;

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(cplx s, DenseMatrix a);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

struct Triplet {
  std::size_t row;
  std::size_t col;
  cplx value;
};

/// Sparse complex matrix (CSR) on a TruncatedSpace. Immutable after
/// construction; exact zeros are never stored.
class SystemOperator {
 public:
  SystemOperator() = default;
  /// Duplicate (row, col) entries are summed; entries summing to exactly zero are dropped.
  SystemOperator(const TruncatedSpace& space, std::vector<Triplet> entries);

  static SystemOperator zero(const TruncatedSpace& space);
  static SystemOperator identity(const TruncatedSpace& space);

  const TruncatedSpace& space() const { return space_; }
  std::size_t dim() const { return space_.dim(); }
  std::size_t nnz() const { return val_.size(); }
  kernels::CsrView view() const;
  std::vector<Triplet> triplets() const;

  /// Stored value at (row, col), zero when absent.
  cplx at(std::size_t row, std::size_t col) const;

  SystemOperator adjoint() const;
  SystemOperator scaled(cplx s) const;

  /// y = A x
  StateVector apply(std::span<const cplx> x) const;
  /// Y += alpha * A X
  void apply_left_acc(const DenseMatrix& x, cplx alpha, DenseMatrix& y) const;
  /// A X
  DenseMatrix apply_left(const DenseMatrix& x) const;
  /// X A
  DenseMatrix apply_right(const DenseMatrix& x) const;

  DenseMatrix to_dense() const;
  /// max |entry|
  double max_abs() const;
  /// max row sum of |entry| (induced infinity norm)
  double norm_inf() const;
  /// max column sum of |entry| (induced one norm)
  double norm_one() const;

 private:
  TruncatedSpace space_;
  std::vector<std::uint32_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<cplx> val_;
};

SystemOperator operator+(const SystemOperator& a, const SystemOperator& b);
SystemOperator operator-(const SystemOperator& a, const SystemOperator& b);
SystemOperator operator*(cplx s, const SystemOperator& a);
/// Sparse product A B.
SystemOperator operator*(const SystemOperator& a, const SystemOperator& b);
SystemOperator commutator(const SystemOperator& a, const SystemOperator& b);
/// Linear combination sum_i c_i A_i over operators on the same space.
SystemOperator linear_combination(std::span<const SystemOperator> ops, std::span<const cplx> coeffs);
/// max |A_rc - B_rc|
double max_abs_diff(const SystemOperator& a, const SystemOperator& b);
/// Tr{A X}
cplx trace_product(const SystemOperator& a, const DenseMatrix& x);

// Ladder operators. The truncation drops transitions leaving the box, so
// [a, a^dagger] = 1 holds only below the cutoff.
SystemOperator ladder_a(const TruncatedSpace& space);
SystemOperator ladder_a_dag(const TruncatedSpace& space);
SystemOperator ladder_b(const TruncatedSpace& space);
SystemOperator ladder_b_dag(const TruncatedSpace& space);
SystemOperator number_a(const TruncatedSpace& space);
SystemOperator number_b(const TruncatedSpace& space);

/// <u|v>
cplx inner(std::span<const cplx> u, std::span<const cplx> v);
double norm2(std::span<const cplx> u);

}  // namespace qcm
