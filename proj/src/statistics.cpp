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

#include "qcm/statistics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::string coords(const std::vector<std::size_t>& idx, const IncrementGrid& grid) {
  std::ostringstream os;
  os << "grid point (";
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (a) os << ", ";
    os << "kappa[" << a << "]=" << grid.axes[a].kappa[idx[a]];
  }
  os << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// IncrementGrid

std::vector<double> IncrementGrid::counting_nodes(std::size_t n) {
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) k[j] = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
  return k;
}

std::vector<double> IncrementGrid::symmetric_nodes(double kappa_max, std::size_t n) {
  if (n < 2) throw ConfigError("symmetric grid needs at least 2 points");
  std::vector<double> k(n);
  const double step = 2.0 * kappa_max / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) k[j] = -kappa_max + step * static_cast<double>(j);
  k[n - 1] = kappa_max;
  return k;
}

void IncrementGrid::validate(std::size_t observables) const {
  if (breakpoints.size() < 2 || breakpoints.front() != 0.0) {
    throw ConfigError("increment grid: breakpoints must start at 0 and define at least one interval");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i] > breakpoints[i - 1])) throw ConfigError("increment grid: breakpoints must be increasing");
  if (axes.empty() || axes.size() > 4) throw ConfigError("increment grid: between 1 and 4 axes are supported");
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const Axis& ax = axes[a];
    if (ax.interval + 1 >= breakpoints.size()) throw ConfigError("increment grid: axis interval out of range");
    if (ax.observable >= observables) throw ConfigError("increment grid: axis observable out of range");
    if (!is_power_of_two(ax.kappa.size())) throw ConfigError("increment grid: axis sizes must be powers of two");
    for (std::size_t b = 0; b < a; ++b)
      if (axes[b].interval == ax.interval && axes[b].observable == ax.observable) {
        throw ConfigError("increment grid: two axes sample the same increment");
      }
  }
}

std::vector<std::size_t> IncrementGrid::shape() const {
  std::vector<std::size_t> s;
  for (const Axis& a : axes) s.push_back(a.kappa.size());
  return s;
}

std::size_t IncrementGrid::size() const {
  std::size_t n = 1;
  for (const Axis& a : axes) n *= a.kappa.size();
  return n;
}

std::vector<std::size_t> IncrementGrid::unflatten(std::size_t p) const {
  std::vector<std::size_t> idx(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    idx[a] = p % axes[a].kappa.size();
    p /= axes[a].kappa.size();
  }
  return idx;
}

TestFunction IncrementGrid::test_function(const std::vector<std::size_t>& idx, std::size_t observables) const {
  std::vector<std::vector<double>> val(breakpoints.size() - 1, std::vector<double>(observables, 0.0));
  for (std::size_t a = 0; a < axes.size(); ++a) val[axes[a].interval][axes[a].observable] = axes[a].kappa[idx[a]];
  return TestFunction(breakpoints, std::move(val));
}

// ---------------------------------------------------------------------------
// Characteristic functions

CharfuncGrid joint_charfunc(const GeneratorContext& tmpl, const IncrementGrid& grid, const DensityOperator& rho0,
                            const EvolutionConfig& cfg, std::size_t threads) {
  const std::size_t m = tmpl.spec.observables();
  grid.validate(m);
  EvolutionConfig c = cfg;
  c.t_end = grid.breakpoints.back();
  c.store_stride = std::numeric_limits<std::size_t>::max();
  c.store_states = false;
  c.observer = nullptr;
  c.leakage_companion = false;

  CharfuncGrid out;
  out.shape = grid.shape();
  const std::size_t n = grid.size();
  out.values.assign(n, cplx{0.0, 0.0});
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t p = next.fetch_add(1); p < n; p = next.fetch_add(1)) {
      try {
        const GeneratorContext ctx{tmpl.model, tmpl.spec, tmpl.field, grid.test_function(grid.unflatten(p), m)};
        out.values[p] = evolve(ctx, rho0, c).phi.back();
      } catch (...) {
        errors[p] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, n);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();

  for (std::size_t p = 0; p < n; ++p) {
    if (!errors[p]) continue;
    const std::string where = coords(grid.unflatten(p), grid);
    try {
      std::rethrow_exception(errors[p]);
    } catch (const ContractivityError& e) {
      throw ContractivityError(where + ": " + e.what());
    } catch (const IntegrationError& e) {
      throw IntegrationError(where + ": " + e.what());
    }
  }

  const GeneratorContext ctx0{tmpl.model, tmpl.spec, tmpl.field, TestFunction::zero(m)};
  c.store_stride = 1;
  out.max_leakage = evolve(ctx0, rho0, c).max_leakage();
  return out;
}

std::function<cplx(double)> charfunc_slice(const GeneratorContext& tmpl, double t0, double t1, std::size_t alpha,
                                           const DensityOperator& rho0, const EvolutionConfig& cfg) {
  const std::size_t m = tmpl.spec.observables();
  if (alpha >= m) throw DomainError("charfunc_slice: observable index out of range");
  if (!(t0 >= 0.0 && t1 > t0)) throw DomainError("charfunc_slice: need 0 <= t0 < t1");
  EvolutionConfig c = cfg;
  c.t_end = t1;
  c.store_stride = std::numeric_limits<std::size_t>::max();
  c.observer = nullptr;
  return [tmpl, t0, t1, alpha, m, rho0, c](double kappa) {
    std::vector<double> v(m, 0.0);
    v[alpha] = kappa;
    TestFunction k = t0 > 0.0 ? TestFunction({0.0, t0, t1}, {std::vector<double>(m, 0.0), v})
                              : TestFunction({0.0, t1}, {v});
    const GeneratorContext ctx{tmpl.model, tmpl.spec, tmpl.field, std::move(k)};
    return evolve(ctx, rho0, c).phi.back();
  };
}

// ---------------------------------------------------------------------------
// Inversion

CountDistribution invert_counting(const std::vector<cplx>& phi, std::size_t n_max) {
  const std::size_t N = phi.size();
  if (N < n_max + 1) {
    throw InversionError("counting inversion needs at least n_max + 1 = " + std::to_string(n_max + 1) +
                         " kappa samples, got " + std::to_string(N));
  }
  CountDistribution d;
  d.probabilities.resize(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      // exponent reduced mod N keeps the phase argument small
      const std::size_t e = (n * j) % N;
      acc += phi[j] * std::polar(1.0, -kTwoPi * static_cast<double>(e) / static_cast<double>(N));
    }
    acc /= static_cast<double>(N);
    d.imaginary_residue = std::max(d.imaginary_residue, std::abs(acc.imag()));
    d.probabilities[n] = acc.real();
  }
  if (d.imaginary_residue > 1e-6) {
    std::ostringstream os;
    os << "counting inversion: imaginary residue " << d.imaginary_residue << " exceeds 1e-6";
    throw InversionError(os.str());
  }
  for (std::size_t n = 0; n <= n_max; ++n) {
    double& p = d.probabilities[n];
    d.most_negative = std::min(d.most_negative, p);
    if (p < -1e-7) {
      std::ostringstream os;
      os << "p(" << n << ") = " << p << " clipped to 0";
      d.warnings.push_back(os.str());
      p = 0.0;
    }
    d.total_mass += p;
  }
  return d;
}

JointCountDistribution invert_counting_joint(const CharfuncGrid& grid, std::size_t n_max) {
  const std::size_t r = grid.shape.size();
  for (std::size_t N : grid.shape)
    if (N < n_max + 1) throw InversionError("joint counting inversion: an axis has fewer than n_max + 1 samples");

  // Transform one axis at a time: the current array has extents ext, axis a goes N_a -> n_max + 1.
  std::vector<std::size_t> ext = grid.shape;
  std::vector<cplx> cur = grid.values;
  for (std::size_t a = 0; a < r; ++a) {
    const std::size_t N = ext[a];
    std::size_t outer = 1, inner = 1;
    for (std::size_t b = 0; b < a; ++b) outer *= ext[b];
    for (std::size_t b = a + 1; b < r; ++b) inner *= ext[b];
    std::vector<cplx> next(outer * (n_max + 1) * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t n = 0; n <= n_max; ++n)
        for (std::size_t i = 0; i < inner; ++i) {
          cplx acc = 0.0;
          for (std::size_t j = 0; j < N; ++j) {
            const std::size_t e = (n * j) % N;
            acc += cur[(o * N + j) * inner + i] *
                   std::polar(1.0, -kTwoPi * static_cast<double>(e) / static_cast<double>(N));
          }
          next[(o * (n_max + 1) + n) * inner + i] = acc / static_cast<double>(N);
        }
    cur = std::move(next);
    ext[a] = n_max + 1;
  }

  JointCountDistribution d;
  d.shape = ext;
  d.probabilities.resize(cur.size());
  for (std::size_t p = 0; p < cur.size(); ++p) {
    d.imaginary_residue = std::max(d.imaginary_residue, std::abs(cur[p].imag()));
    d.probabilities[p] = cur[p].real();
  }
  if (d.imaginary_residue > 1e-6) {
    std::ostringstream os;
    os << "joint counting inversion: imaginary residue " << d.imaginary_residue << " exceeds 1e-6";
    throw InversionError(os.str());
  }
  for (std::size_t p = 0; p < d.probabilities.size(); ++p) {
    double& v = d.probabilities[p];
    d.most_negative = std::min(d.most_negative, v);
    if (v < -1e-7) {
      std::ostringstream os;
      os << "joint probability at flat index " << p << " = " << v << " clipped to 0";
      d.warnings.push_back(os.str());
      v = 0.0;
    }
    d.total_mass += v;
  }
  return d;
}

QuadratureDensity invert_homodyne(const std::vector<cplx>& phi, double kappa_max, const std::vector<double>& x) {
  const std::size_t N = phi.size();
  if (N < 2 || !(kappa_max > 0.0)) throw InversionError("homodyne inversion needs a symmetric grid with kappa_max > 0");
  const double edge = std::max(std::abs(phi.front()), std::abs(phi.back()));
  if (edge >= 1e-8) {
    std::ostringstream os;
    os << "|Phi| = " << edge << " at kappa = +-" << kappa_max << " has not decayed below 1e-8; raise kappa_max";
    throw AliasingError(os.str());
  }
  const std::vector<double> kappa = IncrementGrid::symmetric_nodes(kappa_max, N);
  const double step = 2.0 * kappa_max / static_cast<double>(N - 1);
  QuadratureDensity q;
  q.x = x;
  q.density.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double w = (j == 0 || j + 1 == N) ? 0.5 : 1.0;
      acc += w * phi[j] * std::polar(1.0, -kappa[j] * x[i]);
    }
    acc *= step / kTwoPi;
    q.imaginary_residue = std::max(q.imaginary_residue, std::abs(acc.imag()));
    q.density[i] = acc.real();
  }
  for (std::size_t i = 1; i < x.size(); ++i) q.total_mass += 0.5 * (x[i] - x[i - 1]) * (q.density[i] + q.density[i - 1]);
  return q;
}

// ---------------------------------------------------------------------------
// Moments

namespace {

// F(j) = f(j h)
template <class Samples>
cplx derivative(const Samples& F, int k, double h) {
  switch (k) {
    case 1:
      return (-F(2) + 8.0 * F(1) - 8.0 * F(-1) + F(-2)) / (12.0 * h);
    case 2:
      return (-F(2) + 16.0 * F(1) - 30.0 * F(0) + 16.0 * F(-1) - F(-2)) / (12.0 * h * h);
    case 3:
      return (-F(3) + 8.0 * F(2) - 13.0 * F(1) + 13.0 * F(-1) - 8.0 * F(-2) + F(-3)) / (8.0 * h * h * h);
    case 4:
      return (-F(3) + 12.0 * F(2) - 39.0 * F(1) + 56.0 * F(0) - 39.0 * F(-1) + 12.0 * F(-2) - F(-3)) /
             (6.0 * h * h * h * h);
    default:
      throw DomainError("derivative order must be 1..4");
  }
}

}  // namespace

Moments moments_from_charfunc(const std::function<cplx(double)>& phi, int order, double h) {
  if (order < 1 || order > 4) throw DomainError("moments_from_charfunc: order must be 1..4");
  if (!(h > 0.0)) throw DomainError("moments_from_charfunc: step must be positive");
  // Sample once on the union of both stencils.
  std::vector<cplx> coarse(7), fine(7);
  const int reach = order >= 3 ? 3 : 2;
  for (int j = -reach; j <= reach; ++j) coarse[static_cast<std::size_t>(j + 3)] = phi(j * h);
  for (int j = -reach; j <= reach; ++j) {
    fine[static_cast<std::size_t>(j + 3)] = (j % 2 == 0) ? coarse[static_cast<std::size_t>(j / 2 + 3)]
                                                         : phi(j * 0.5 * h);
  }
  Moments m;
  cplx ik{1.0, 0.0};
  for (int k = 1; k <= order; ++k) {
    ik *= cplx{0.0, -1.0};  // i^{-k}
    const cplx dh = derivative([&](int j) { return coarse[static_cast<std::size_t>(j + 3)]; }, k, h);
    const cplx dh2 = derivative([&](int j) { return fine[static_cast<std::size_t>(j + 3)]; }, k, 0.5 * h);
    const cplx rich = (16.0 * dh2 - dh) / 15.0;
    const cplx val = ik * rich;
    m.raw.push_back(val.real());
    m.imaginary_part = std::max(m.imaginary_part, std::abs(val.imag()));
    m.richardson_gap = std::max(m.richardson_gap, std::abs(dh2 - dh));
  }
  return m;
}

double default_kappa_max(const std::function<cplx(double)>& phi) {
  const Moments m = moments_from_charfunc(phi, 2);
  const double var = m.raw[1] - m.raw[0] * m.raw[0];
  if (!(var > 0.0)) throw InversionError("cannot pick kappa_max: estimated variance is not positive");
  return 12.0 / std::sqrt(var);
}

}  // namespace qcm
