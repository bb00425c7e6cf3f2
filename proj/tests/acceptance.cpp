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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "qcm/errors.hpp"
#include "qcm/oracle.hpp"
#include "qcm/statistics.hpp"
#include "test_support.hpp"

using namespace qcm;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

DpoParams reference_params(double g = 0.5, double nbar = 0.05, double nbar_p = 0.02) {
  return DpoParams::from_splits(1.0, g, 1.0, nbar, 2.0, nbar_p, {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)},
                                {0.5, std::sqrt(0.5), 0.5}, 0.3, 0.5);
}

DenseMatrix vacuum(const TruncatedSpace& s) { return DenseMatrix::projector(basis_vector(s, 0, 0)); }

EvolutionConfig adaptive(double t_end, double rtol) {
  EvolutionConfig c;
  c.t_end = t_end;
  c.method = StepMethod::Adaptive;
  c.rtol = rtol;
  c.atol = 1e-3 * rtol;
  return c;
}

Outcome dissipativity() {
  const TruncatedSpace s(12, 8);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    worst = std::max(worst, check_dissipativity(dpo_model(random_dpo_params(seed), s)).max_residual);
  return {worst < 1e-10, fmt("max residual %.3e over 20 draws", worst)};
}

Outcome master_equation() {
  const TruncatedSpace s(12, 8);
  const DpoParams p = reference_params();
  const GeneratorContext ctx = testing::dpo_context(p, s, TestFunction::zero(3), 100.0);
  const testing::MasterEquation rhs(p, s);
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const DenseMatrix rho = testing::random_hermitian(s.dim(), rng);
    const double t = u(rng);
    const Eigen::MatrixXcd want = rhs(t, testing::to_eigen(rho));
    const Eigen::MatrixXcd got = testing::to_eigen(apply_generator(ctx, t, rho));
    worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-12, fmt("max entry difference %.3e over 100 matrices", worst)};
}

Outcome trace_preservation() {
  const TruncatedSpace s(12, 8);
  const DpoParams p = reference_params();
  const GeneratorContext ctx = testing::dpo_context(p, s, TestFunction::zero(3), 100.0);
  EvolutionConfig cfg;
  cfg.t_end = 3.0 / p.kappa;
  const EvolutionResult res = evolve(ctx, vacuum(s), cfg);
  double worst = 0.0;
  for (const cplx& phi : res.phi) worst = std::max(worst, std::abs(phi - 1.0));
  const double leak = res.max_leakage();
  return {worst < 1e-7 && leak < 1e-6, fmt("max |Phi - 1| %.3e, leakage %.3e", worst, leak)};
}

Outcome contractivity() {
  const TruncatedSpace s(6, 4);
  const double t = 2.0;
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int i = 0; i < 30; ++i) {
    const TestFunction k = testing::random_test_function(rng, 3, t, 1 + i % 4, 3.0);
    const GeneratorContext ctx = testing::dpo_context(random_dpo_params(100 + i), s, k, 1.5);
    EvolutionConfig cfg;
    cfg.t_end = t;
    for (const cplx& phi : evolve(ctx, vacuum(s), cfg).phi) worst = std::max(worst, std::abs(phi));
  }
  return {worst <= 1.0 + 1e-9, fmt("max |Phi| = 1 + %.3e over 30 test functions", worst - 1.0)};
}

Outcome gram_psd() {
  const TruncatedSpace s(5, 3);
  const double t = 1.5;
  const DpoParams p = reference_params();
  std::mt19937_64 rng(505);
  double worst = std::numeric_limits<double>::infinity();
  for (int set = 0; set < 10; ++set) {
    std::vector<TestFunction> ks;
    for (int i = 0; i < 5; ++i) ks.push_back(testing::random_test_function(rng, 3, t, 2, 1.5));
    Eigen::MatrixXcd gram(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const GeneratorContext ctx = testing::dpo_context(p, s, ks[i] - ks[j], 1.0);
        EvolutionConfig cfg;
        cfg.t_end = t;
        gram(i, j) = evolve(ctx, vacuum(s), cfg).phi.back();
      }
    const Eigen::MatrixXcd herm = 0.5 * (gram + gram.adjoint());
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm).eigenvalues().minCoeff();
    worst = std::min(worst, lo);
  }
  return {worst >= -1e-7, fmt("smallest eigenvalue %.3e over 10 sets", worst)};
}

GeneratorContext composition_context(std::mt19937_64& rng, double t) {
  return testing::dpo_context(reference_params(), TruncatedSpace(5, 3),
                              testing::random_test_function(rng, 3, t, 3, 1.5), 0.8 * t);
}

Outcome composition() {
  const double t = 2.0, tol = 1e-8;
  std::mt19937_64 rng(606);
  const GeneratorContext ctx = composition_context(rng, t);
  const double split = std::uniform_real_distribution<double>(0.1, 0.9)(rng) * t;
  const double r = composition_check(ctx, vacuum(ctx.model.space()), split, t, adaptive(t, tol));
  return {r < 10.0 * tol, fmt("residual %.3e at s = %.4f", r, split)};
}

Outcome poisson() {
  const ObservableSpec counter({{1.0}}, {{TimeFunction{}}}, {TimeFunction{}}, {TimeFunction{}});
  const GeneratorContext ctx{system_free_model(1), counter, FieldProfile({TimeFunction::constant(std::sqrt(2.0))}),
                             TestFunction::zero(1)};
  IncrementGrid g;
  g.breakpoints = {0.0, 1.0};
  g.axes = {{0, 0, IncrementGrid::counting_nodes(64)}};
  const CharfuncGrid cf = joint_charfunc(ctx, g, DenseMatrix::identity(1), adaptive(1.0, 1e-11));
  const CountDistribution d = invert_counting(cf.values, 20);
  double worst = 0.0;
  for (std::size_t n = 0; n <= 20; ++n)
    worst = std::max(worst, std::abs(d.probabilities[n] - std::exp(-2.0 + double(n) * std::log(2.0) -
                                                                     std::lgamma(double(n) + 1.0))));
  return {worst < 1e-8, fmt("max |p(n) - Poisson(2)| %.3e", worst)};
}

Outcome gaussian() {
  const double t = 1.0;
  std::vector<double> x;
  for (int i = 0; i <= 200; ++i) x.push_back(-5.0 + 0.05 * i);
  double worst = 0.0;
  for (const cplx f : {cplx(0.0, 0.0), cplx(0.6, -0.4)}) {
    const ObservableSpec homodyne({{0.0}}, {{TimeFunction::constant(1.0)}}, {TimeFunction{}}, {TimeFunction{}});
    const GeneratorContext ctx{system_free_model(1), homodyne, FieldProfile({TimeFunction::constant(f)}),
                               TestFunction::zero(1)};
    const double kmax = default_kappa_max(charfunc_slice(ctx, 0.0, t, 0, DenseMatrix::identity(1), adaptive(t, 1e-11)));
    IncrementGrid g;
    g.breakpoints = {0.0, t};
    g.axes = {{0, 0, IncrementGrid::symmetric_nodes(kmax, 128)}};
    const QuadratureDensity q =
        invert_homodyne(joint_charfunc(ctx, g, DenseMatrix::identity(1), adaptive(t, 1e-11)).values, kmax, x);
    // X = int (h f* + h* f) + white noise of variance t
    const double mean = 2.0 * f.real() * t;
    for (std::size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst, std::abs(q.density[i] - std::exp(-0.5 * (x[i] - mean) * (x[i] - mean) / t) /
                                                          std::sqrt(2.0 * kPi * t)));
  }
  return {worst < 1e-6, fmt("sup density error %.3e (vacuum and coherent)", worst)};
}

Outcome brute_force() {
  std::mt19937_64 rng(909);
  const TruncatedSpace s(3, 1);
  double worst = 0.0;
  for (int draw = 0; draw < 4; ++draw) {
    const GeneratorContext ctx =
        testing::dpo_context(random_dpo_params(900 + draw), s, testing::random_test_function(rng, 3, 1.0, 3, 2.0), 0.7);
    const DenseMatrix rho0 = testing::random_density(s.dim(), rng);
    EvolutionConfig cfg = adaptive(1.0, 1e-11);
    cfg.freeze = true;
    worst = std::max(worst, max_abs_diff(evolve(ctx, rho0, cfg).final_state, dense_expm_propagate(ctx, rho0, 1.0)));
  }
  const TruncatedSpace small(2, 1);
  const GeneratorContext ctx =
      testing::dpo_context(reference_params(), small, testing::random_test_function(rng, 3, 1.0, 3, 2.0), 0.6);
  std::vector<Triplet> xt;
  std::normal_distribution<double> g;
  for (std::size_t r = 0; r < small.dim(); ++r)
    for (std::size_t c = 0; c < small.dim(); ++c) xt.push_back({r, c, {g(rng), g(rng)}});
  const double dual = duality_check(ctx, 1.0, SystemOperator(small, xt), testing::random_density(small.dim(), rng),
                                    adaptive(1.0, 1e-11));
  return {worst < 1e-8 && dual < 1e-7, fmt("engine vs exponential %.3e, duality %.3e", worst, dual)};
}

Outcome linear_model() {
  const DpoParams p = reference_params(0.0, 0.0, 0.0);
  const TruncatedSpace s(2, 8);
  const GeneratorContext ctx = testing::dpo_context(p, s, TestFunction::zero(3), 100.0);
  const SystemOperator b = ladder_b(s);
  EvolutionConfig cfg;
  cfg.t_end = 3.0 / p.kappa_p;
  cfg.dt = 1e-3;
  double worst = 0.0;
  cfg.observer = [&](double t, const DenseMatrix& rho) {
    if (t == 0.0) return;
    const cplx I{0.0, 1.0};
    const cplx beta = -I * p.lambda_drive * std::exp(-2.0 * I * p.omega_c * t) * (1.0 - std::exp(-p.kappa_p * t)) /
                      p.kappa_p;
    worst = std::max(worst, std::abs(trace_product(b, rho) - beta) / std::abs(beta));
  };
  evolve(ctx, vacuum(s), cfg);
  return {worst < 1e-6, fmt("max relative error of <b> %.3e", worst)};
}

// Largest dt <= dt0 for which halving doubles the step count of every
// segment met by the three propagations of composition_check, so that all
// step sizes scale by exactly 1/2.
double aligned_step(const GeneratorContext& ctx, double s, double t, double dt0) {
  std::vector<double> lengths;
  auto collect = [&](const GeneratorContext& c, double end) {
    double prev = 0.0;
    std::vector<double> bp = c.breakpoints(end);
    bp.push_back(end);
    for (double b : bp) {
      lengths.push_back(b - prev);
      prev = b;
    }
  };
  collect(ctx, t);
  collect(ctx, s);
  collect(ctx.shifted(s), t - s);
  for (double dt = dt0; dt > 0.5 * dt0; dt *= 1.0 - 1e-4) {
    bool ok = true;
    for (double len : lengths) {
      const double x = len / dt, frac = x - std::floor(x);
      ok = ok && frac > 0.02 && frac < 0.48;
    }
    if (ok) return dt;
  }
  throw DomainError("no aligned step found");
}

Outcome convergence() {
  const double t = 2.0;
  std::mt19937_64 rng(606);
  const GeneratorContext ctx = composition_context(rng, t);
  const double split = std::uniform_real_distribution<double>(0.1, 0.9)(rng) * t;
  const double dt = aligned_step(ctx, split, t, 0.02);
  const DenseMatrix rho0 = vacuum(ctx.model.space());
  const DenseMatrix exact = propagate(ctx, rho0, 0.0, t, adaptive(t, 1e-13));
  auto fixed = [&](double h) {
    EvolutionConfig cfg;
    cfg.t_end = t;
    cfg.dt = h;
    return cfg;
  };
  const double ratio = composition_check(ctx, rho0, split, t, fixed(dt)) /
                       composition_check(ctx, rho0, split, t, fixed(0.5 * dt));
  // one-shot error against a tight adaptive run, for reference
  const double direct = max_abs_diff(propagate(ctx, rho0, 0.0, t, fixed(dt)), exact) /
                        max_abs_diff(propagate(ctx, rho0, 0.0, t, fixed(0.5 * dt)), exact);
  char buf[160];
  std::snprintf(buf, sizeof buf, "residual ratio %.3f at dt = %.5f (one-shot error ratio %.3f)", ratio, dt, direct);
  return {ratio >= 12.0 && ratio <= 20.0, buf};
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"dissipativity", 5.0, dissipativity},
      {"master-equation equivalence", 10.0, master_equation},
      {"trace preservation", 60.0, trace_preservation},
      {"contractivity", 300.0, contractivity},
      {"positive-definite Gram matrices", 600.0, gram_psd},
      {"composition", 120.0, composition},
      {"Poisson counts", 30.0, poisson},
      {"Gaussian quadrature", 30.0, gaussian},
      {"brute-force agreement", 60.0, brute_force},
      {"linear model", 60.0, linear_model},
      {"fourth-order convergence", 300.0, convergence},
  };
  std::vector<std::size_t> selected;
  for (int a = 1; a < argc; ++a) {
    const long n = std::strtol(argv[a], nullptr, 10);
    if (n < 1 || n > long(criteria.size())) {
      std::fprintf(stderr, "usage: acceptance [criterion 1..%zu ...]\n", criteria.size());
      return 2;
    }
    selected.push_back(std::size_t(n - 1));
  }
  if (selected.empty())
    for (std::size_t i = 0; i < criteria.size(); ++i) selected.push_back(i);

  int failures = 0;
  for (const std::size_t i : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < criteria[i].budget_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("%s %2zu %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                out.detail.c_str(), secs, criteria[i].budget_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
