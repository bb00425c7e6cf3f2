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

#include "qcm/evolution.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

using OnStep = std::function<void(double, const DenseMatrix&)>;

std::vector<double> cuts_between(const GeneratorContext& ctx, double t0, double t1) {
  std::vector<double> out;
  for (double x : ctx.breakpoints(t1))
    if (x > t0) out.push_back(x);
  return out;
}

class Integrator {
 public:
  Integrator(const Generator& gen, const EvolutionConfig& cfg, double dt)
      : gen_(gen), cfg_(cfg), dt_(dt), ws_(gen.make_workspace()) {
    const std::size_t n = gen.dim();
    for (DenseMatrix* m : {&k1_, &k2_, &k3_, &k4_, &stage_, &full_, &half_, &two_}) *m = DenseMatrix(n);
  }

  void run(DenseMatrix& y, double t0, double t1, const std::vector<double>& cuts, const OnStep& on_step) {
    double a = t0;
    for (std::size_t s = 0; s <= cuts.size(); ++s) {
      const double b = s < cuts.size() ? cuts[s] : t1;
      if (b > a) {
        if (cfg_.method == StepMethod::Rk4) {
          fixed_segment(y, a, b, on_step);
        } else {
          adaptive_segment(y, a, b, on_step);
        }
      }
      a = b;
    }
  }

  const StepStats& stats() const { return stats_; }

 private:
  void note_step(double h) {
    ++stats_.accepted;
    stats_.min_dt = stats_.accepted == 1 ? h : std::min(stats_.min_dt, h);
    stats_.max_dt = std::max(stats_.max_dt, h);
  }

  // One classical RK4 step; `anchor` resolves the piecewise data of the segment.
  void rk4(double t, double h, double anchor, const DenseMatrix& y, DenseMatrix& out) {
    const kernels::KernelTable& kt = kernels::active();
    const std::size_t len = y.size();
    auto te = [&](double x) { return cfg_.freeze ? anchor : x; };
    gen_.apply(te(t), anchor, y, k1_, *ws_);
    std::copy(y.data(), y.data() + len, stage_.data());
    kt.zaxpy(len, 0.5 * h, k1_.data(), stage_.data());
    gen_.apply(te(t + 0.5 * h), anchor, stage_, k2_, *ws_);
    std::copy(y.data(), y.data() + len, stage_.data());
    kt.zaxpy(len, 0.5 * h, k2_.data(), stage_.data());
    gen_.apply(te(t + 0.5 * h), anchor, stage_, k3_, *ws_);
    std::copy(y.data(), y.data() + len, stage_.data());
    kt.zaxpy(len, h, k3_.data(), stage_.data());
    gen_.apply(te(t + h), anchor, stage_, k4_, *ws_);
    if (&out != &y) std::copy(y.data(), y.data() + len, out.data());
    kt.zaxpy(len, h / 6.0, k1_.data(), out.data());
    kt.zaxpy(len, h / 3.0, k2_.data(), out.data());
    kt.zaxpy(len, h / 3.0, k3_.data(), out.data());
    kt.zaxpy(len, h / 6.0, k4_.data(), out.data());
    stats_.rhs_evaluations += 4;
  }

  void fixed_segment(DenseMatrix& y, double a, double b, const OnStep& on_step) {
    const double anchor = 0.5 * (a + b);
    const double len = b - a;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / dt_ * (1.0 - 1e-12))));
    const double h = len / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = a + static_cast<double>(j) * h;
      rk4(t, h, anchor, y, y);
      note_step(h);
      on_step(j + 1 == n ? b : a + static_cast<double>(j + 1) * h, y);
    }
  }

  void adaptive_segment(DenseMatrix& y, double a, double b, const OnStep& on_step) {
    const kernels::KernelTable& kt = kernels::active();
    const std::size_t len = y.size();
    const double anchor = 0.5 * (a + b);
    double t = a;
    double h = std::min(h_next_ > 0.0 ? h_next_ : dt_, b - a);
    std::size_t rejections = 0;
    while (t < b) {
      bool last = false;
      if (t + h >= b || (b - (t + h)) < 1e-12 * (b - a)) {
        h = b - t;
        last = true;
      }
      rk4(t, h, anchor, y, full_);
      rk4(t, 0.5 * h, anchor, y, half_);
      rk4(t + 0.5 * h, 0.5 * h, anchor, half_, two_);
      const double diff = kt.max_abs_diff(len, two_.data(), full_.data());
      const double scale = cfg_.atol + cfg_.rtol * two_.max_abs();
      const double err = diff / (15.0 * scale);
      if (err <= 1.0) {
        // two_ + (two_ - full_) / 15
        kt.zaxpby(len, cplx{-1.0 / 15.0}, full_.data(), cplx{16.0 / 15.0}, two_.data());
        std::swap(y, two_);
        t = last ? b : t + h;
        note_step(h);
        on_step(t, y);
        rejections = 0;
        const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 4.0;
        h_next_ = h * std::clamp(grow, 0.2, 4.0);
        if (!last) h = h_next_;
      } else {
        ++stats_.rejected;
        if (++rejections > cfg_.max_rejections) {
          std::ostringstream os;
          os << "adaptive step rejected " << rejections << " times in a row at t = " << t << " (h = " << h
             << ", error ratio " << err << ")";
          throw IntegrationError(os.str());
        }
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
      }
    }
  }

  const Generator& gen_;
  const EvolutionConfig& cfg_;
  double dt_;
  double h_next_ = 0.0;
  Generator::WorkspacePtr ws_;
  DenseMatrix k1_, k2_, k3_, k4_, stage_, full_, half_, two_;
  StepStats stats_;
};

double resolve_dt(const GeneratorContext& ctx, const EvolutionConfig& cfg, double t0, double t1) {
  if (cfg.dt > 0.0) return cfg.dt;
  const double span = t1 - t0;
  const double dt = default_step(ctx.shifted(t0), span);
  return dt > 0.0 ? dt : std::max(span, 1.0);
}

void check_initial_state(const DenseMatrix& rho0, std::size_t dim) {
  if (rho0.dim() != dim) {
    throw DimensionError("initial state has dimension " + std::to_string(rho0.dim()) + ", model " +
                         std::to_string(dim));
  }
  const double herm = rho0.hermiticity_deviation();
  if (herm > 1e-10) throw ValidationError("initial state is not Hermitian (deviation " + std::to_string(herm) + ")");
  const cplx tr = rho0.trace();
  if (std::abs(tr - 1.0) > 1e-10) throw ValidationError("initial state trace is not 1");
  const double lo = smallest_eigenvalue(rho0);
  if (lo < -1e-10) throw ValidationError("initial state is not positive (eigenvalue " + std::to_string(lo) + ")");
}

}  // namespace

void EvolutionConfig::validate() const {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("evolution: t_end must be finite and >= 0");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ConfigError("evolution: dt must be finite and >= 0 (0 = automatic)");
  if (store_stride == 0) throw ConfigError("evolution: store_stride must be >= 1");
  if (guard < 0) throw ConfigError("evolution: guard must be >= 0");
  if (method == StepMethod::Adaptive && !(rtol > 0.0 && atol >= 0.0)) {
    throw ConfigError("evolution: adaptive stepping needs rtol > 0 and atol >= 0");
  }
}

double EvolutionResult::max_leakage() const {
  return leakage.empty() ? 0.0 : *std::max_element(leakage.begin(), leakage.end());
}

double leakage(const TruncatedSpace& space, const DenseMatrix& rho, int guard) {
  if (guard <= 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    const auto [n, m] = space.levels(i);
    // A mode with cutoff 0 is a trivial factor, not a truncation.
    const bool band_a = space.n_max() > 0 && n > space.n_max() - guard;
    const bool band_b = space.m_max() > 0 && m > space.m_max() - guard;
    if (band_a || band_b) sum += std::abs(rho(i, i));
  }
  return sum;
}

double default_step(const GeneratorContext& ctx, double t_end) {
  const Generator gen(ctx);
  std::vector<double> cuts = ctx.breakpoints(t_end);
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(t_end);
  double bound = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    bound = std::max(bound, gen.norm_bound(mid, mid));
  }
  if (t_end == 0.0) bound = gen.norm_bound(0.0, 0.0);
  return bound > 0.0 ? 0.1 / bound : 0.0;
}

double smallest_eigenvalue(const DenseMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.dim());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      m(r, c) = 0.5 * (x(std::size_t(r), std::size_t(c)) + std::conj(x(std::size_t(c), std::size_t(r))));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DenseMatrix propagate(const GeneratorContext& ctx, const DenseMatrix& x, double t0, double t1,
                      const EvolutionConfig& cfg, StepStats* stats) {
  if (t1 < t0) throw DomainError("propagate: t1 < t0");
  const Generator gen(ctx);
  if (x.dim() != gen.dim()) throw DimensionError("propagate: operator dimension does not match the model");
  DenseMatrix y = x;
  if (t1 == t0) return y;
  Integrator integ(gen, cfg, resolve_dt(ctx, cfg, t0, t1));
  integ.run(y, t0, t1, cuts_between(ctx, t0, t1), [](double, const DenseMatrix&) {});
  if (stats) *stats = integ.stats();
  return y;
}

EvolutionResult evolve(const GeneratorContext& ctx, const DensityOperator& rho0, const EvolutionConfig& cfg) {
  cfg.validate();
  const Generator gen(ctx);
  check_initial_state(rho0, gen.dim());
  const TruncatedSpace& space = ctx.model.space();
  const bool markov = ctx.k.is_zero();

  EvolutionResult res;
  const double herm0 = rho0.hermiticity_deviation();
  auto store = [&](double t, const DenseMatrix& y) {
    res.times.push_back(t);
    res.phi.push_back(y.trace());
    if (cfg.store_states) res.states.push_back(y);
    if (markov) {
      res.leakage_times.push_back(t);
      res.leakage.push_back(leakage(space, y, cfg.guard));
    }
    if (cfg.observer) cfg.observer(t, y);
  };

  DenseMatrix y = rho0;
  store(0.0, y);
  if (cfg.t_end > 0.0) {
    std::size_t steps = 0;
    double last_stored = 0.0;
    auto on_step = [&](double t, const DenseMatrix& cur) {
      ++steps;
      const cplx phi = cur.trace();
      if (std::abs(phi) > 1.0 + 1e-6) {
        std::ostringstream os;
        os << "|Phi| = " << std::abs(phi) << " exceeds 1 at t = " << t
           << "; the truncation or the step size is inadequate";
        throw ContractivityError(os.str());
      }
      if (markov) {
        const double drift = std::max(0.0, cur.hermiticity_deviation() - herm0);
        res.max_hermiticity_drift = std::max(res.max_hermiticity_drift, drift);
        if (drift > 1e-8) {
          std::ostringstream os;
          os << "Hermiticity drift " << drift << " at t = " << t;
          throw IntegrationError(os.str());
        }
      }
      if (steps % cfg.store_stride == 0) {
        store(t, cur);
        last_stored = t;
      }
    };
    const double dt = resolve_dt(ctx, cfg, 0.0, cfg.t_end);
    Integrator integ(gen, cfg, dt);
    integ.run(y, 0.0, cfg.t_end, cuts_between(ctx, 0.0, cfg.t_end), on_step);
    if (last_stored != cfg.t_end) store(cfg.t_end, y);
    res.stats = integ.stats();
  }
  res.final_state = y;

  if (!markov && cfg.leakage_companion) {
    // Same step boundaries as the k run, so the grids coincide in fixed-step mode.
    GeneratorContext ctx0{ctx.model, ctx.spec, ctx.field, TestFunction::zero(ctx.k.observables())};
    EvolutionConfig c0 = cfg;
    c0.observer = nullptr;
    c0.store_states = false;
    if (c0.dt == 0.0) c0.dt = resolve_dt(ctx, cfg, 0.0, cfg.t_end);
    DenseMatrix z = rho0;
    res.leakage_times.push_back(0.0);
    res.leakage.push_back(leakage(space, z, cfg.guard));
    if (cfg.t_end > 0.0) {
      const Generator gen0(ctx0);
      Integrator integ(gen0, c0, c0.dt);
      std::size_t steps = 0;
      double last = 0.0;
      integ.run(z, 0.0, cfg.t_end, cuts_between(ctx, 0.0, cfg.t_end), [&](double t, const DenseMatrix& cur) {
        if (++steps % cfg.store_stride == 0) {
          res.leakage_times.push_back(t);
          res.leakage.push_back(leakage(space, cur, cfg.guard));
          last = t;
        }
      });
      if (last != cfg.t_end) {
        res.leakage_times.push_back(cfg.t_end);
        res.leakage.push_back(leakage(space, z, cfg.guard));
      }
    }
  }
  return res;
}

double composition_check(const GeneratorContext& ctx, const DenseMatrix& rho0, double s, double t,
                         const EvolutionConfig& cfg) {
  if (!(s >= 0.0 && s <= t)) throw DomainError("composition_check needs 0 <= s <= t");
  const DenseMatrix direct = propagate(ctx, rho0, 0.0, t, cfg);
  const DenseMatrix first = propagate(ctx, rho0, 0.0, s, cfg);
  const DenseMatrix second = propagate(ctx.shifted(s), first, 0.0, t - s, cfg);
  return max_abs_diff(direct, second);
}

}  // namespace qcm
