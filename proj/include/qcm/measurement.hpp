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

// Observable-side data of the continuous measurement: commuting channel
// observables B^alpha (stored by their eigenvalues in the channel basis z_i),
// the functions h^alpha, b, c, and the scalar quantities built from them.

#include <Eigen/Dense>
#include <vector>

#include "qcm/time_function.hpp"

namespace qcm {

enum class ObservableKind {
  Counting,   // eigenvalues in {0,1}, h = 0: integer-valued increments
  Diffusive,  // B = 0, h != 0: real-valued increments with a density
  Mixed,      // anything else; inverted on the counting path
  Null,       // B = 0 and h = 0: the increment is deterministic (c only)
};

class ObservableSpec {
 public:
  ObservableSpec() = default;
  /// eigenvalues[alpha][i] = B^alpha_i; h[alpha][i] = h^alpha_i(t); b[i]; c[alpha].
  /// Throws ValidationError when B^alpha h^beta != 0 or Im<h^alpha|h^beta> != 0
  /// or c is not real-valued.
  ObservableSpec(std::vector<std::vector<double>> eigenvalues, std::vector<std::vector<TimeFunction>> h,
                 std::vector<TimeFunction> b, std::vector<TimeFunction> c);

  /// m observables on d channels with B = 0, h = 0, b = 0, c = 0.
  static ObservableSpec trivial(std::size_t m, std::size_t d);

  std::size_t observables() const { return eig_.size(); }
  std::size_t channels() const { return d_; }
  double eigenvalue(std::size_t alpha, std::size_t i) const { return eig_[alpha][i]; }
  const std::vector<std::vector<double>>& eigenvalues() const { return eig_; }
  const TimeFunction& h(std::size_t alpha, std::size_t i) const { return h_[alpha][i]; }
  const TimeFunction& b(std::size_t i) const { return b_[i]; }
  const TimeFunction& c(std::size_t alpha) const { return c_[alpha]; }

  ObservableKind kind(std::size_t alpha) const;

  /// Jump times of h, b, c.
  std::vector<double> discontinuities() const;

  /// The same observables with every function shifted: x -> f(x + s).
  ObservableSpec shifted(double s) const;

 private:
  std::size_t d_ = 0;
  std::vector<std::vector<double>> eig_;
  std::vector<std::vector<TimeFunction>> h_;
  std::vector<TimeFunction> b_;
  std::vector<TimeFunction> c_;
};

/// Piecewise-constant test function: value kappa^l on (t_{l-1}, t_l), zero
/// before t_0 = 0 and after t_n.
class TestFunction {
 public:
  TestFunction() = default;
  TestFunction(std::vector<double> breakpoints, std::vector<std::vector<double>> values);

  static TestFunction zero(std::size_t m);
  /// kappa on (0, t) and zero afterwards.
  static TestFunction constant(std::vector<double> kappa, double t);

  std::size_t observables() const { return m_; }
  const std::vector<double>& breakpoints() const { return bp_; }
  const std::vector<std::vector<double>>& values() const { return val_; }
  bool is_zero() const;

  /// Value of the piece containing `anchor`.
  std::vector<double> at(double anchor) const;

  /// k_s(x) = k(x + s), restricted to x > 0.
  TestFunction shifted(double s) const;

  TestFunction operator-() const;
  friend TestFunction operator+(const TestFunction& a, const TestFunction& b);
  friend TestFunction operator-(const TestFunction& a, const TestFunction& b) { return a + (-b); }

 private:
  std::size_t m_ = 0;
  std::vector<double> bp_;
  std::vector<std::vector<double>> val_;
};

/// Diagonal of S(kappa) = prod_alpha exp(i kappa_alpha B^alpha) in the z basis.
Eigen::VectorXcd S_of_kappa(const ObservableSpec& spec, const std::vector<double>& kappa);

/// r(kappa; t)_i = i sum_alpha kappa_alpha h^alpha_i(t) + (S_ii - 1) b_i(t).
Eigen::VectorXcd r_of_k(const ObservableSpec& spec, const std::vector<double>& kappa, double t, double anchor);
inline Eigen::VectorXcd r_of_k(const ObservableSpec& spec, const std::vector<double>& kappa, double t) {
  return r_of_k(spec, kappa, t, t);
}

/// C = <b|(S - 1) b> + i sum kappa_alpha c^alpha - 1/2 sum kappa_alpha <h^alpha|h^beta> kappa_beta.
cplx C_scalar(const ObservableSpec& spec, const std::vector<double>& kappa, double t, double anchor);
inline cplx C_scalar(const ObservableSpec& spec, const std::vector<double>& kappa, double t) {
  return C_scalar(spec, kappa, t, t);
}

/// (d+1)x(d+1) coefficients of the characteristic-operator QSDE; index 0 is
/// the time/vacuum slot, 1..d the channels.
Eigen::MatrixXcd G_coefficients(const ObservableSpec& spec, const std::vector<double>& kappa, double t);

/// Two photocounters (channels 0 and 1, B = projectors) and a homodyne
/// detector on channel 2 with h(t) = exp(i (theta3 - omega t)); d = 8, m = 3.
ObservableSpec dpo_observables(double theta3, double omega_c);

}  // namespace qcm
