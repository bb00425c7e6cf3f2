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

// Finite-dimensional model data: the system operator K, the channel
// operators R_1..R_d and the scalar scattering matrix S. The operators N_j
// are not stored; derived_N computes them on demand.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qcm/fock.hpp"

namespace qcm {

using ScatteringMatrix = Eigen::MatrixXcd;

class ModelSpec {
 public:
  ModelSpec() = default;
  /// Checks shapes only (R.size() == S.rows() == S.cols(), common space);
  /// unitarity of S is reported by check_S_unitary.
  ModelSpec(SystemOperator K, std::vector<SystemOperator> R, ScatteringMatrix S, std::string label = {});

  const TruncatedSpace& space() const { return K_.space(); }
  std::size_t channels() const { return R_.size(); }
  const SystemOperator& K() const { return K_; }
  const std::vector<SystemOperator>& R() const { return R_; }
  const SystemOperator& R(std::size_t i) const { return R_.at(i); }
  const ScatteringMatrix& S() const { return S_; }
  const std::string& label() const { return label_; }

 private:
  SystemOperator K_;
  std::vector<SystemOperator> R_;
  ScatteringMatrix S_;
  std::string label_;
};

/// d channels on a one-dimensional system with K = 0, R_i = 0, S = 1: the
/// field alone, whose statistics have closed forms.
ModelSpec system_free_model(std::size_t channels);

/// Degenerate parametric oscillator constants. Amplitudes alpha/beta are the
/// channel couplings; only their squared-modulus sums are constrained.
struct DpoParams {
  double omega_c = 1.0;
  double g = 0.0;
  double kappa = 1.0;
  double nbar = 0.0;
  double kappa_p = 1.0;
  double nbar_p = 0.0;
  std::array<cplx, 4> alpha{};
  std::array<cplx, 4> beta{};
  double theta3 = 0.0;
  cplx lambda_drive{0.0, 0.0};

  /// Splits the constrained totals with fractions c (sum |c_i|^2 = 1):
  /// alpha = (sqrt(2 kappa (nbar+1)) c_1..c_3, sqrt(2 kappa nbar)), same for beta.
  static DpoParams from_splits(double omega_c, double g, double kappa, double nbar, double kappa_p,
                               double nbar_p, const std::array<cplx, 3>& alpha_split,
                               const std::array<cplx, 3>& beta_split, double theta3,
                               cplx lambda_drive);

  /// Throws ValidationError naming every violated constraint.
  void validate() const;
};

/// Random valid parameters: omega_c, kappa, kappa_p in [0.5, 2], g in [0.1, 1],
/// nbar, nbar_p in [0, 0.3], random unit splits and phases, |lambda| <= 1.
DpoParams random_dpo_params(std::uint64_t seed);

/// Builds K entrywise from the DPO formula on the truncation, d = 8 channels
/// in the order (beta1 b, alpha1 a, alpha2 a, beta2 b, beta3 b, alpha3 a,
/// beta4 b^dagger, alpha4 a^dagger) and S = identity. Channels 0 and 1 feed
/// the photocounters, 2 the homodyne detector, 3 carries the laser.
ModelSpec dpo_model(const DpoParams& params, const TruncatedSpace& space);

/// H_0 = omega a^dag a + 2 omega b^dag b + (i g / 2)(a^dag^2 b - b^dag a^2), entrywise on the truncation.
SystemOperator dpo_hamiltonian(const DpoParams& params, const TruncatedSpace& space);

struct DissipativityReport {
  double max_residual = 0.0;
  std::size_t interior_dim = 0;
  std::size_t samples = 0;
};

/// Residual |2 Re<Ku|u> + sum_k ||R_k u||^2| over the interior basis vectors
/// (n <= n_max - guard, m <= m_max - guard) and `random_vectors` random unit
/// vectors supported there. Throws DomainError when the interior is empty.
DissipativityReport check_dissipativity(const ModelSpec& model, int guard = 2,
                                        std::size_t random_vectors = 16, std::uint64_t seed = 1);

/// max |(S^dag S - 1)_ij| v |(S S^dag - 1)_ij|
double check_S_unitary(const ModelSpec& model);

/// N_j = -sum_k R_k^dagger S_kj (0-based channel j).
SystemOperator derived_N(const ModelSpec& model, std::size_t j);

}  // namespace qcm
