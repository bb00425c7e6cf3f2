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

// Time stepping of d rho/dt = G_t[rho] from rho(0) = rho0. Phi_t(k) = Tr rho(t).
//
// The interval [0, t_end] is split at every jump of k, f, h, b, c; inside a
// segment the coefficients are smooth, so the classical RK4 keeps its order.

#include <cstddef>
#include <functional>
#include <vector>

#include "qcm/fock.hpp"
#include "qcm/generator.hpp"

namespace qcm {

enum class StepMethod {
  Rk4,       // fixed step, dt adjusted down so each segment holds a whole number of steps
  Adaptive,  // RK4 step doubling with local extrapolation
};

struct EvolutionConfig {
  double t_end = 1.0;
  double dt = 0.0;  // 0 selects 0.1 / (generator norm bound)
  StepMethod method = StepMethod::Rk4;
  double rtol = 1e-8;
  double atol = 1e-12;
  int guard = 2;
  std::size_t store_stride = 1;
  bool store_states = false;
  // Coefficients frozen at segment midpoints (brute-force comparisons).
  bool freeze = false;
  // For k != 0: run a k = 0 companion to report leakage.
  bool leakage_companion = false;
  std::size_t max_rejections = 64;
  std::function<void(double t, const DenseMatrix& rho)> observer;

  /// Throws ConfigError.
  void validate() const;
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double min_dt = 0.0;
  double max_dt = 0.0;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<cplx> phi;
  std::vector<DenseMatrix> states;  // filled when store_states
  // Guard-band population; aligned with leakage_times (equal to `times` when k = 0).
  std::vector<double> leakage_times;
  std::vector<double> leakage;
  DenseMatrix final_state;
  double max_hermiticity_drift = 0.0;
  StepStats stats;

  double max_leakage() const;
};

/// Integrates from rho0 (checked: Hermitian, unit trace, positive up to
/// 1e-10). At k = 0 the Hermiticity drift must stay below 1e-8
/// (IntegrationError otherwise); |Phi| > 1 + 1e-6 raises ContractivityError.
EvolutionResult evolve(const GeneratorContext& ctx, const DensityOperator& rho0, const EvolutionConfig& cfg);

/// rho(t1) from rho(t0) = x for any operator x, without state checks.
/// cfg.t_end is ignored.
DenseMatrix propagate(const GeneratorContext& ctx, const DenseMatrix& x, double t0, double t1,
                      const EvolutionConfig& cfg, StepStats* stats = nullptr);

/// max |rho_{0->t} - rho_{s->t} o rho_{0->s}|, where the second leg runs the
/// shifted context (f_s, k_s, h_s, b_s, c_s) from 0 to t - s.
double composition_check(const GeneratorContext& ctx, const DenseMatrix& rho0, double s, double t,
                         const EvolutionConfig& cfg);

/// Sum of |rho_{(n,m),(n,m)}| over n > n_max - guard or m > m_max - guard;
/// a mode with cutoff 0 has no band.
double leakage(const TruncatedSpace& space, const DenseMatrix& rho, int guard);

/// dt = 0.1 / max over segment midpoints of the generator norm bound.
double default_step(const GeneratorContext& ctx, double t_end);

/// Smallest eigenvalue of the Hermitian part of x.
double smallest_eigenvalue(const DenseMatrix& x);

}  // namespace qcm
