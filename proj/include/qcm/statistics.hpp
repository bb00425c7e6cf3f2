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

// Joint characteristic functions of output increments and their inversion
// into count distributions, quadrature densities and moments.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qcm/evolution.hpp"

namespace qcm {

/// Time breakpoints t_0 = 0 < ... < t_n and up to four sampled axes, each
/// pairing an interval (t_{l-1}, t_l) with an observable. Every other
/// (interval, observable) slot has kappa = 0.
struct IncrementGrid {
  struct Axis {
    std::size_t interval = 0;    // 0-based: (t_interval, t_interval+1)
    std::size_t observable = 0;  // 0-based
    std::vector<double> kappa;
  };

  std::vector<double> breakpoints;
  std::vector<Axis> axes;

  /// kappa_j = 2 pi j / n, j < n.
  static std::vector<double> counting_nodes(std::size_t n);
  /// kappa_j = -kappa_max + j * 2 kappa_max / (n - 1), j < n.
  static std::vector<double> symmetric_nodes(double kappa_max, std::size_t n);

  /// Throws ConfigError: unsorted breakpoints, more than 4 axes, axis sizes
  /// not powers of two, indices out of range.
  void validate(std::size_t observables) const;

  std::vector<std::size_t> shape() const;
  std::size_t size() const;
  /// Row-major multi-index of flat point p.
  std::vector<std::size_t> unflatten(std::size_t p) const;
  /// The test function of grid point idx.
  TestFunction test_function(const std::vector<std::size_t>& idx, std::size_t observables) const;
};

struct CharfuncGrid {
  std::vector<std::size_t> shape;
  std::vector<cplx> values;  // row-major over the axes
  double max_leakage = 0.0;  // from the k = 0 companion run
};

/// One evolve per grid point, spread over `threads` workers; values are
/// assembled by index so the result does not depend on scheduling. Errors
/// are rethrown with the grid coordinates of the first failing point.
CharfuncGrid joint_charfunc(const GeneratorContext& tmpl, const IncrementGrid& grid, const DensityOperator& rho0,
                            const EvolutionConfig& cfg, std::size_t threads = 1);

/// kappa -> Phi for a single increment (interval [t0, t1], observable alpha).
std::function<cplx(double)> charfunc_slice(const GeneratorContext& tmpl, double t0, double t1, std::size_t alpha,
                                           const DensityOperator& rho0, const EvolutionConfig& cfg);

struct CountDistribution {
  std::vector<double> probabilities;  // p(0..n_max)
  double imaginary_residue = 0.0;     // max |Im p(n)|
  double total_mass = 0.0;
  double most_negative = 0.0;
  std::vector<std::string> warnings;
};

/// p(n) = (1/N) sum_j Phi(2 pi j / N) e^{-i n 2 pi j / N}. Values below -1e-7
/// are clipped to 0 with a warning. Throws InversionError when the imaginary
/// residue exceeds 1e-6 or N < n_max + 1.
CountDistribution invert_counting(const std::vector<cplx>& phi, std::size_t n_max);

struct JointCountDistribution {
  std::vector<std::size_t> shape;     // n_max + 1 per axis
  std::vector<double> probabilities;  // row-major
  double imaginary_residue = 0.0;
  double total_mass = 0.0;
  double most_negative = 0.0;
  std::vector<std::string> warnings;
};

/// Multi-axis version of invert_counting over a CharfuncGrid of counting axes.
JointCountDistribution invert_counting_joint(const CharfuncGrid& grid, std::size_t n_max);

struct QuadratureDensity {
  std::vector<double> x;
  std::vector<double> density;
  double imaginary_residue = 0.0;
  double total_mass = 0.0;  // trapezoid over x
};

/// (1/2 pi) int Phi(kappa) e^{-i kappa x} dkappa by the trapezoid rule on the
/// symmetric grid. Throws AliasingError when |Phi| >= 1e-8 at either end.
QuadratureDensity invert_homodyne(const std::vector<cplx>& phi, double kappa_max, const std::vector<double>& x);

struct Moments {
  std::vector<double> raw;     // E[X^k], k = 1..order
  double richardson_gap = 0.0; // max |D(h) - D(h/2)| over the orders
  double imaginary_part = 0.0; // max |Im| of i^{-k} Phi^(k)(0)
};

/// i^{-k} d^k Phi / d kappa^k at 0, k <= order <= 4, by 4th-order central
/// differences (5 points for k <= 2, 7 points for k = 3, 4) at steps h and
/// h/2, combined by Richardson extrapolation.
Moments moments_from_charfunc(const std::function<cplx(double)>& phi, int order, double h = 0.05);

/// 12 / sigma with sigma^2 estimated from the second cumulant.
double default_kappa_max(const std::function<cplx(double)>& phi);

}  // namespace qcm
