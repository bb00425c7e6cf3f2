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

#include "qcm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

void require_same_space(const TruncatedSpace& a, const TruncatedSpace& b, const char* what) {
  if (!(a == b)) {
    throw DimensionError(std::string(what) + ": operands live on different truncated spaces (" +
                         std::to_string(a.n_max()) + "," + std::to_string(a.m_max()) + ") vs (" +
                         std::to_string(b.n_max()) + "," + std::to_string(b.m_max()) + ")");
  }
}

void require_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(got) + " != " +
                         std::to_string(want));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// TruncatedSpace

TruncatedSpace::TruncatedSpace(int n_max, int m_max) : n_max_(n_max), m_max_(m_max) {
  if (n_max < 0 || m_max < 0) throw DomainError("truncation cutoffs must be nonnegative");
}

std::size_t TruncatedSpace::index(int n, int m) const {
  if (!contains(n, m)) {
    throw DomainError("basis state (" + std::to_string(n) + "," + std::to_string(m) +
                      ") outside the truncation");
  }
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(m_max_ + 1) +
         static_cast<std::size_t>(m);
}

std::pair<int, int> TruncatedSpace::levels(std::size_t flat) const {
  if (flat >= dim()) throw DomainError("flat index out of range");
  const auto stride = static_cast<std::size_t>(m_max_ + 1);
  return {static_cast<int>(flat / stride), static_cast<int>(flat % stride)};
}

StateVector basis_vector(const TruncatedSpace& space, int n, int m) {
  StateVector v(space.dim());
  v[space.index(n, m)] = 1.0;
  return v;
}

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix DenseMatrix::identity(std::size_t dim) {
  DenseMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::projector(const StateVector& psi) {
  DenseMatrix m(psi.size());
  for (std::size_t r = 0; r < psi.size(); ++r)
    for (std::size_t c = 0; c < psi.size(); ++c) m(r, c) = psi[r] * std::conj(psi[c]);
  return m;
}

cplx DenseMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i];
  return t;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(dim_);
  kernels::active().adjoint_acc(dim_, data(), 1.0, out.data());
  return out;
}

double DenseMatrix::hermiticity_deviation() const {
  double dev = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      dev = std::max(dev, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return dev;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& v : data_) m = std::max(m, std::abs(v));
  return m;
}

void DenseMatrix::set_zero() { std::fill(data_.begin(), data_.end(), cplx{0.0, 0.0}); }

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require_dim(other.dim_, dim_, "DenseMatrix +=");
  kernels::active().zaxpy(data_.size(), 1.0, other.data(), data());
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  require_dim(other.dim_, dim_, "DenseMatrix -=");
  kernels::active().zaxpy(data_.size(), -1.0, other.data(), data());
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(cplx s) {
  kernels::active().zscal(data_.size(), s, data());
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(cplx s, DenseMatrix a) { return a *= s; }

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require_dim(b.dim(), a.dim(), "max_abs_diff");
  return kernels::active().max_abs_diff(a.size(), a.data(), b.data());
}

// ---------------------------------------------------------------------------
// SystemOperator

SystemOperator::SystemOperator(const TruncatedSpace& space, std::vector<Triplet> entries)
    : space_(space) {
  const std::size_t n = space.dim();
  for (const Triplet& t : entries) {
    if (t.row >= n || t.col >= n) {
      throw DimensionError("operator entry (" + std::to_string(t.row) + "," +
                           std::to_string(t.col) + ") outside dimension " + std::to_string(n));
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(n + 1, 0);
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    cplx sum = 0.0;
    while (j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col) {
      sum += entries[j].value;
      ++j;
    }
    if (sum != cplx{0.0, 0.0}) {
      col_.push_back(static_cast<std::uint32_t>(entries[i].col));
      val_.push_back(sum);
      ++row_ptr_[entries[i].row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < n; ++r) row_ptr_[r + 1] += row_ptr_[r];
}

SystemOperator SystemOperator::zero(const TruncatedSpace& space) { return SystemOperator(space, {}); }

SystemOperator SystemOperator::identity(const TruncatedSpace& space) {
  std::vector<Triplet> t;
  t.reserve(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i) t.push_back({i, i, 1.0});
  return SystemOperator(space, std::move(t));
}

kernels::CsrView SystemOperator::view() const {
  return {dim(), row_ptr_.data(), col_.data(), val_.data()};
}

std::vector<Triplet> SystemOperator::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < dim(); ++r)
    for (std::uint32_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) out.push_back({r, col_[e], val_[e]});
  return out;
}

cplx SystemOperator::at(std::size_t row, std::size_t col) const {
  if (row >= dim() || col >= dim()) throw DimensionError("SystemOperator::at out of range");
  const auto first = col_.begin() + row_ptr_[row];
  const auto last = col_.begin() + row_ptr_[row + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
  if (it == last || *it != col) return 0.0;
  return val_[static_cast<std::size_t>(it - col_.begin())];
}

SystemOperator SystemOperator::adjoint() const {
  std::vector<Triplet> t = triplets();
  for (Triplet& e : t) {
    std::swap(e.row, e.col);
    e.value = std::conj(e.value);
  }
  return SystemOperator(space_, std::move(t));
}

SystemOperator SystemOperator::scaled(cplx s) const {
  std::vector<Triplet> t = triplets();
  for (Triplet& e : t) e.value *= s;
  return SystemOperator(space_, std::move(t));
}

StateVector SystemOperator::apply(std::span<const cplx> x) const {
  require_dim(x.size(), dim(), "SystemOperator::apply");
  StateVector y(dim());
  kernels::active().spmm_acc(view(), x.data(), 1, 1.0, y.data());
  return y;
}

void SystemOperator::apply_left_acc(const DenseMatrix& x, cplx alpha, DenseMatrix& y) const {
  require_dim(x.dim(), dim(), "SystemOperator::apply_left");
  require_dim(y.dim(), dim(), "SystemOperator::apply_left");
  kernels::active().spmm_acc(view(), x.data(), dim(), alpha, y.data());
}

DenseMatrix SystemOperator::apply_left(const DenseMatrix& x) const {
  DenseMatrix y(dim());
  apply_left_acc(x, 1.0, y);
  return y;
}

DenseMatrix SystemOperator::apply_right(const DenseMatrix& x) const {
  // X A = (A^dagger X^dagger)^dagger
  return adjoint().apply_left(x.adjoint()).adjoint();
}

DenseMatrix SystemOperator::to_dense() const {
  DenseMatrix out(dim());
  for (std::size_t r = 0; r < dim(); ++r)
    for (std::uint32_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) out(r, col_[e]) = val_[e];
  return out;
}

double SystemOperator::max_abs() const {
  double m = 0.0;
  for (const cplx& v : val_) m = std::max(m, std::abs(v));
  return m;
}

double SystemOperator::norm_inf() const {
  double m = 0.0;
  for (std::size_t r = 0; r < dim(); ++r) {
    double s = 0.0;
    for (std::uint32_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) s += std::abs(val_[e]);
    m = std::max(m, s);
  }
  return m;
}

double SystemOperator::norm_one() const {
  std::vector<double> colsum(dim(), 0.0);
  for (std::size_t e = 0; e < val_.size(); ++e) colsum[col_[e]] += std::abs(val_[e]);
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

SystemOperator operator+(const SystemOperator& a, const SystemOperator& b) {
  require_same_space(a.space(), b.space(), "operator+");
  std::vector<Triplet> t = a.triplets();
  for (const Triplet& e : b.triplets()) t.push_back(e);
  return SystemOperator(a.space(), std::move(t));
}

SystemOperator operator-(const SystemOperator& a, const SystemOperator& b) {
  require_same_space(a.space(), b.space(), "operator-");
  std::vector<Triplet> t = a.triplets();
  for (Triplet e : b.triplets()) {
    e.value = -e.value;
    t.push_back(e);
  }
  return SystemOperator(a.space(), std::move(t));
}

SystemOperator operator*(cplx s, const SystemOperator& a) { return a.scaled(s); }

SystemOperator operator*(const SystemOperator& a, const SystemOperator& b) {
  require_same_space(a.space(), b.space(), "operator*");
  const kernels::CsrView av = a.view();
  const kernels::CsrView bv = b.view();
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < av.rows; ++r)
    for (std::uint32_t e = av.row_ptr[r]; e < av.row_ptr[r + 1]; ++e) {
      const std::uint32_t k = av.col[e];
      for (std::uint32_t f = bv.row_ptr[k]; f < bv.row_ptr[k + 1]; ++f)
        t.push_back({r, bv.col[f], av.val[e] * bv.val[f]});
    }
  return SystemOperator(a.space(), std::move(t));
}

SystemOperator commutator(const SystemOperator& a, const SystemOperator& b) { return a * b - b * a; }

SystemOperator linear_combination(std::span<const SystemOperator> ops, std::span<const cplx> coeffs) {
  if (ops.size() != coeffs.size()) throw DimensionError("linear_combination: size mismatch");
  if (ops.empty()) throw DimensionError("linear_combination: no operators");
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    require_same_space(ops[0].space(), ops[i].space(), "linear_combination");
    if (coeffs[i] == cplx{0.0, 0.0}) continue;
    for (Triplet e : ops[i].triplets()) {
      e.value *= coeffs[i];
      t.push_back(e);
    }
  }
  return SystemOperator(ops[0].space(), std::move(t));
}

double max_abs_diff(const SystemOperator& a, const SystemOperator& b) { return (a - b).max_abs(); }

cplx trace_product(const SystemOperator& a, const DenseMatrix& x) {
  require_dim(x.dim(), a.dim(), "trace_product");
  cplx acc = 0.0;
  for (const Triplet& t : a.triplets()) acc += t.value * x(t.col, t.row);
  return acc;
}

// ---------------------------------------------------------------------------
// Ladder operators

SystemOperator ladder_a(const TruncatedSpace& s) {
  std::vector<Triplet> t;
  for (int n = 1; n <= s.n_max(); ++n)
    for (int m = 0; m <= s.m_max(); ++m) t.push_back({s.index(n - 1, m), s.index(n, m), std::sqrt(double(n))});
  return SystemOperator(s, std::move(t));
}

SystemOperator ladder_a_dag(const TruncatedSpace& s) {
  std::vector<Triplet> t;
  for (int n = 0; n < s.n_max(); ++n)
    for (int m = 0; m <= s.m_max(); ++m) t.push_back({s.index(n + 1, m), s.index(n, m), std::sqrt(double(n + 1))});
  return SystemOperator(s, std::move(t));
}

SystemOperator ladder_b(const TruncatedSpace& s) {
  std::vector<Triplet> t;
  for (int n = 0; n <= s.n_max(); ++n)
    for (int m = 1; m <= s.m_max(); ++m) t.push_back({s.index(n, m - 1), s.index(n, m), std::sqrt(double(m))});
  return SystemOperator(s, std::move(t));
}

SystemOperator ladder_b_dag(const TruncatedSpace& s) {
  std::vector<Triplet> t;
  for (int n = 0; n <= s.n_max(); ++n)
    for (int m = 0; m < s.m_max(); ++m) t.push_back({s.index(n, m + 1), s.index(n, m), std::sqrt(double(m + 1))});
  return SystemOperator(s, std::move(t));
}

SystemOperator number_a(const TruncatedSpace& s) {
  std::vector<Triplet> t;
  for (int n = 0; n <= s.n_max(); ++n)
    for (int m = 0; m <= s.m_max(); ++m) t.push_back({s.index(n, m), s.index(n, m), double(n)});
  return SystemOperator(s, std::move(t));
}

SystemOperator number_b(const TruncatedSpace& s) {
  std::vector<Triplet> t;
  for (int n = 0; n <= s.n_max(); ++n)
    for (int m = 0; m <= s.m_max(); ++m) t.push_back({s.index(n, m), s.index(n, m), double(m)});
  return SystemOperator(s, std::move(t));
}

cplx inner(std::span<const cplx> u, std::span<const cplx> v) {
  require_dim(v.size(), u.size(), "inner");
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

double norm2(std::span<const cplx> u) {
  double s = 0.0;
  for (const cplx& x : u) s += std::norm(x);
  return s;
}

}  // namespace qcm
