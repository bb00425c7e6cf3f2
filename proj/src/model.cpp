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

#include "qcm/model.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qcm/errors.hpp"

namespace qcm {

ModelSpec::ModelSpec(SystemOperator K, std::vector<SystemOperator> R, ScatteringMatrix S, std::string label)
    : K_(std::move(K)), R_(std::move(R)), S_(std::move(S)), label_(std::move(label)) {
  const auto d = static_cast<Eigen::Index>(R_.size());
  if (S_.rows() != d || S_.cols() != d) {
    throw DimensionError("scattering matrix must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  for (const SystemOperator& r : R_) {
    if (!(r.space() == K_.space())) throw DimensionError("channel operator on a different space than K");
  }
}

ModelSpec system_free_model(std::size_t channels) {
  const TruncatedSpace space(0, 0);
  std::vector<SystemOperator> R(channels, SystemOperator::zero(space));
  const auto d = static_cast<Eigen::Index>(channels);
  return ModelSpec(SystemOperator::zero(space), std::move(R), ScatteringMatrix::Identity(d, d),
                   "system-free");
}

DpoParams DpoParams::from_splits(double omega_c, double g, double kappa, double nbar, double kappa_p,
                                 double nbar_p, const std::array<cplx, 3>& alpha_split,
                                 const std::array<cplx, 3>& beta_split, double theta3,
                                 cplx lambda_drive) {
  auto unit = [](const std::array<cplx, 3>& c, const char* name) {
    const double s = std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]);
    if (std::abs(s - 1.0) > 1e-12) {
      throw ValidationError(std::string(name) + " splitting fractions must satisfy sum |c_i|^2 = 1");
    }
  };
  unit(alpha_split, "alpha");
  unit(beta_split, "beta");
  DpoParams p;
  p.omega_c = omega_c;
  p.g = g;
  p.kappa = kappa;
  p.nbar = nbar;
  p.kappa_p = kappa_p;
  p.nbar_p = nbar_p;
  const double a_tot = std::sqrt(2.0 * kappa * (nbar + 1.0));
  const double b_tot = std::sqrt(2.0 * kappa_p * (nbar_p + 1.0));
  for (int i = 0; i < 3; ++i) {
    p.alpha[i] = a_tot * alpha_split[i];
    p.beta[i] = b_tot * beta_split[i];
  }
  p.alpha[3] = std::sqrt(2.0 * kappa * nbar);
  p.beta[3] = std::sqrt(2.0 * kappa_p * nbar_p);
  p.theta3 = theta3;
  p.lambda_drive = lambda_drive;
  return p;
}

void DpoParams::validate() const {
  std::ostringstream err;
  auto check_sum = [&](double got, double want, const char* identity) {
    if (std::abs(got - want) > 1e-12 * std::max(1.0, std::abs(want))) {
      err << "  " << identity << ": got " << got << ", expected " << want << "\n";
    }
  };
  if (!(omega_c > 0.0)) err << "  omega_c > 0 violated\n";
  if (!(kappa > 0.0)) err << "  kappa > 0 violated\n";
  if (!(kappa_p > 0.0)) err << "  kappa_p > 0 violated\n";
  if (!(nbar >= 0.0)) err << "  nbar >= 0 violated\n";
  if (!(nbar_p >= 0.0)) err << "  nbar_p >= 0 violated\n";
  if (!std::isfinite(g)) err << "  g must be finite\n";
  check_sum(std::norm(alpha[0]) + std::norm(alpha[1]) + std::norm(alpha[2]), 2.0 * kappa * (nbar + 1.0),
            "|alpha1|^2+|alpha2|^2+|alpha3|^2 = 2 kappa (nbar+1)");
  check_sum(std::norm(alpha[3]), 2.0 * kappa * nbar, "|alpha4|^2 = 2 kappa nbar");
  check_sum(std::norm(beta[0]) + std::norm(beta[1]) + std::norm(beta[2]), 2.0 * kappa_p * (nbar_p + 1.0),
            "|beta1|^2+|beta2|^2+|beta3|^2 = 2 kappa_p (nbar_p+1)");
  check_sum(std::norm(beta[3]), 2.0 * kappa_p * nbar_p, "|beta4|^2 = 2 kappa_p nbar_p");
  if (lambda_drive != cplx{0.0, 0.0} && beta[1] == cplx{0.0, 0.0}) {
    err << "  beta2 != 0 required when the laser drive is on\n";
  }
  const std::string msg = err.str();
  if (!msg.empty()) throw ValidationError("invalid DPO parameters:\n" + msg);
}

SystemOperator dpo_hamiltonian(const DpoParams& p, const TruncatedSpace& s) {
  std::vector<Triplet> t;
  const cplx I{0.0, 1.0};
  for (int n = 0; n <= s.n_max(); ++n) {
    for (int m = 0; m <= s.m_max(); ++m) {
      const std::size_t row = s.index(n, m);
      t.push_back({row, row, p.omega_c * double(n + 2 * m)});
      if (s.contains(n - 2, m + 1))
        t.push_back({row, s.index(n - 2, m + 1), 0.5 * I * p.g * std::sqrt(double(n) * (n - 1) * (m + 1))});
      if (s.contains(n + 2, m - 1))
        t.push_back({row, s.index(n + 2, m - 1), -0.5 * I * p.g * std::sqrt(double(m) * (n + 1) * (n + 2))});
    }
  }
  return SystemOperator(s, std::move(t));
}

DpoParams random_dpo_params(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss;
  auto split = [&] {
    std::array<cplx, 3> c{};
    double nrm = 0.0;
    for (cplx& x : c) {
      x = {gauss(rng), gauss(rng)};
      nrm += std::norm(x);
    }
    for (cplx& x : c) x /= std::sqrt(nrm);
    return c;
  };
  const double omega_c = 0.5 + 1.5 * u(rng);
  const double g = 0.1 + 0.9 * u(rng);
  const double kappa = 0.5 + 1.5 * u(rng);
  const double nbar = 0.3 * u(rng);
  const double kappa_p = 0.5 + 1.5 * u(rng);
  const double nbar_p = 0.3 * u(rng);
  const std::array<cplx, 3> a = split(), b = split();
  const double theta3 = 2.0 * std::numbers::pi * u(rng);
  const cplx lambda = std::polar(u(rng), 2.0 * std::numbers::pi * u(rng));
  return DpoParams::from_splits(omega_c, g, kappa, nbar, kappa_p, nbar_p, a, b, theta3, lambda);
}

ModelSpec dpo_model(const DpoParams& p, const TruncatedSpace& s) {
  p.validate();
  const cplx I{0.0, 1.0};
  std::vector<Triplet> t;
  for (int n = 0; n <= s.n_max(); ++n) {
    for (int m = 0; m <= s.m_max(); ++m) {
      const std::size_t row = s.index(n, m);
      const cplx diag = p.kappa * p.nbar + p.kappa_p * p.nbar_p + I * p.omega_c * double(n) +
                        p.kappa * (2.0 * p.nbar + 1.0) * n + 2.0 * I * p.omega_c * double(m) +
                        p.kappa_p * (2.0 * p.nbar_p + 1.0) * m;
      t.push_back({row, row, -diag});
      if (s.contains(n - 2, m + 1))
        t.push_back({row, s.index(n - 2, m + 1), 0.5 * p.g * std::sqrt(double(n) * (n - 1) * (m + 1))});
      if (s.contains(n + 2, m - 1))
        t.push_back({row, s.index(n + 2, m - 1), -0.5 * p.g * std::sqrt(double(m) * (n + 1) * (n + 2))});
    }
  }
  SystemOperator K(s, std::move(t));

  const SystemOperator a = ladder_a(s), ad = ladder_a_dag(s), b = ladder_b(s), bd = ladder_b_dag(s);
  std::vector<SystemOperator> R{
      p.beta[0] * b, p.alpha[0] * a, p.alpha[1] * a, p.beta[1] * b,
      p.beta[2] * b, p.alpha[2] * a, p.beta[3] * bd, p.alpha[3] * ad,
  };
  return ModelSpec(std::move(K), std::move(R), ScatteringMatrix::Identity(8, 8), "dpo");
}

DissipativityReport check_dissipativity(const ModelSpec& model, int guard, std::size_t random_vectors,
                                        std::uint64_t seed) {
  const TruncatedSpace& s = model.space();
  if (guard < 0) throw DomainError("guard must be nonnegative");
  const int n_in = s.n_max() - guard;
  const int m_in = s.m_max() - guard;
  if (n_in < 0 || m_in < 0) {
    throw DomainError("guard " + std::to_string(guard) + " leaves an empty interior on (" +
                      std::to_string(s.n_max()) + "," + std::to_string(s.m_max()) + ")");
  }
  std::vector<std::size_t> interior;
  for (int n = 0; n <= n_in; ++n)
    for (int m = 0; m <= m_in; ++m) interior.push_back(s.index(n, m));

  auto residual = [&](const StateVector& u) {
    const StateVector Ku = model.K().apply(u);
    double lhs = 2.0 * inner(u, Ku).real();
    for (const SystemOperator& r : model.R()) lhs += norm2(r.apply(u));
    return std::abs(lhs);
  };

  DissipativityReport rep;
  rep.interior_dim = interior.size();
  for (std::size_t idx : interior) {
    StateVector u(s.dim());
    u[idx] = 1.0;
    rep.max_residual = std::max(rep.max_residual, residual(u));
    ++rep.samples;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (std::size_t k = 0; k < random_vectors; ++k) {
    StateVector u(s.dim());
    double nrm = 0.0;
    for (std::size_t idx : interior) {
      u[idx] = {gauss(rng), gauss(rng)};
      nrm += std::norm(u[idx]);
    }
    for (cplx& x : u) x /= std::sqrt(nrm);
    rep.max_residual = std::max(rep.max_residual, residual(u));
    ++rep.samples;
  }
  return rep;
}

double check_S_unitary(const ModelSpec& model) {
  const ScatteringMatrix& S = model.S();
  if (S.size() == 0) return 0.0;
  const auto d = S.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const double a = (S.adjoint() * S - id).cwiseAbs().maxCoeff();
  const double b = (S * S.adjoint() - id).cwiseAbs().maxCoeff();
  return std::max(a, b);
}

SystemOperator derived_N(const ModelSpec& model, std::size_t j) {
  if (j >= model.channels()) {
    throw DomainError("channel index " + std::to_string(j) + " out of range (d = " +
                      std::to_string(model.channels()) + ")");
  }
  std::vector<SystemOperator> ops;
  std::vector<cplx> coeffs;
  for (std::size_t k = 0; k < model.channels(); ++k) {
    ops.push_back(model.R(k).adjoint());
    coeffs.push_back(-model.S()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
  }
  return linear_combination(ops, coeffs);
}

}  // namespace qcm
