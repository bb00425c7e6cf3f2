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

#include <doctest.h>

#include <cmath>

#include "qcm/errors.hpp"
#include "qcm/evolution.hpp"
#include "test_support.hpp"

using namespace qcm;

namespace {

DpoParams fixed_params() {
  return DpoParams::from_splits(1.0, 0.5, 1.0, 0.05, 2.0, 0.02, {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)},
                                {std::sqrt(0.25), std::sqrt(0.5), std::sqrt(0.25)}, 0.3, 0.5);
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

}  // namespace

TEST_CASE("k = 0 evolution preserves the trace") {
  const TruncatedSpace s(10, 5);
  const GeneratorContext ctx = testing::dpo_context(fixed_params(), s, TestFunction::zero(3), 10.0);
  EvolutionConfig cfg;
  cfg.t_end = 2.0;
  const EvolutionResult res = evolve(ctx, vacuum(s), cfg);
  REQUIRE(res.times.size() == res.phi.size());
  CHECK(res.times.front() == 0.0);
  CHECK(res.times.back() == 2.0);
  for (std::size_t i = 0; i < res.phi.size(); ++i) CHECK(std::abs(res.phi[i] - 1.0) < 1e-6 + res.leakage[i]);
  CHECK(res.max_leakage() < 1e-4);
  CHECK(res.max_hermiticity_drift < 1e-12);
  CHECK(smallest_eigenvalue(res.final_state) > -1e-8);
}

TEST_CASE("t_end = 0 returns the initial state") {
  const TruncatedSpace s(3, 2);
  const GeneratorContext ctx = testing::dpo_context(fixed_params(), s, TestFunction::zero(3), 1.0);
  EvolutionConfig cfg;
  cfg.t_end = 0.0;
  cfg.store_states = true;
  const EvolutionResult res = evolve(ctx, vacuum(s), cfg);
  CHECK(res.times == std::vector<double>{0.0});
  CHECK(res.phi[0] == cplx(1.0));
  CHECK(max_abs_diff(res.final_state, vacuum(s)) == 0.0);
  CHECK(res.states.size() == 1);
  CHECK(res.stats.accepted == 0);
}

TEST_CASE("store stride and observer") {
  const TruncatedSpace s(3, 2);
  const GeneratorContext ctx = testing::dpo_context(fixed_params(), s, TestFunction::zero(3), 1.0);
  EvolutionConfig cfg;
  cfg.t_end = 1.0;
  cfg.dt = 0.1;
  cfg.store_stride = 3;
  std::vector<double> seen;
  cfg.observer = [&](double t, const DenseMatrix&) { seen.push_back(t); };
  const EvolutionResult res = evolve(ctx, vacuum(s), cfg);
  CHECK(res.stats.accepted == 10);
  // t = 0, every third step and the final time
  CHECK(res.times.size() == 5);
  CHECK(res.times.back() == 1.0);
  CHECK(seen == res.times);
}

TEST_CASE("fixed RK4 converges with fourth order") {
  const TruncatedSpace s(4, 2);
  std::mt19937_64 rng(4);
  const GeneratorContext ctx =
      testing::dpo_context(fixed_params(), s, testing::random_test_function(rng, 3, 1.0, 1, 1.0), 10.0);
  const DenseMatrix ref = evolve(ctx, vacuum(s), adaptive(1.0, 1e-12)).final_state;
  auto err = [&](double dt) {
    EvolutionConfig c;
    c.dt = dt;
    return max_abs_diff(evolve(ctx, vacuum(s), c).final_state, ref);
  };
  const double e1 = err(0.05), e2 = err(0.025);
  CHECK(e1 / e2 > 13.0);
  CHECK(e1 / e2 < 19.0);
}

TEST_CASE("fixed and adaptive steppers agree across jumps") {
  std::mt19937_64 rng(8);
  const TruncatedSpace s(5, 3);
  const GeneratorContext ctx =
      testing::dpo_context(fixed_params(), s, testing::random_test_function(rng, 3, 1.5, 3, 1.5), 1.2);
  EvolutionConfig fixed;
  fixed.t_end = 1.5;
  fixed.dt = 0.005;
  const EvolutionResult a = evolve(ctx, vacuum(s), fixed);
  const EvolutionResult b = evolve(ctx, vacuum(s), adaptive(1.5, 1e-10));
  CHECK(std::abs(a.phi.back() - b.phi.back()) < 1e-8);
  CHECK(std::abs(b.phi.back()) <= 1.0);
  CHECK(b.stats.accepted > 0);
  CHECK(b.stats.min_dt <= b.stats.max_dt);
}

TEST_CASE("composition and shift covariance") {
  std::mt19937_64 rng(12);
  const TruncatedSpace s(5, 3);
  const GeneratorContext ctx =
      testing::dpo_context(fixed_params(), s, testing::random_test_function(rng, 3, 2.0, 3, 1.5), 1.3);
  const EvolutionConfig cfg = adaptive(2.0, 1e-10);
  CHECK(composition_check(ctx, vacuum(s), 0.0, 2.0, cfg) < 1e-12);
  CHECK(composition_check(ctx, vacuum(s), 0.77, 2.0, cfg) < 1e-8);
  CHECK(composition_check(ctx, vacuum(s), 2.0, 2.0, cfg) < 1e-12);
  CHECK_THROWS_AS(composition_check(ctx, vacuum(s), 2.5, 2.0, cfg), DomainError);
}

TEST_CASE("propagate is linear and starts anywhere") {
  std::mt19937_64 rng(13);
  const TruncatedSpace s(3, 2);
  const GeneratorContext ctx =
      testing::dpo_context(fixed_params(), s, testing::random_test_function(rng, 3, 1.0, 2, 1.0), 0.8);
  const EvolutionConfig cfg = adaptive(0.0, 1e-11);
  const DenseMatrix x = testing::random_matrix(s.dim(), rng), y = testing::random_matrix(s.dim(), rng);
  const DenseMatrix lhs = propagate(ctx, x + cplx(0, 2) * y, 0.2, 1.0, cfg);
  const DenseMatrix rhs = propagate(ctx, x, 0.2, 1.0, cfg) + cplx(0, 2) * propagate(ctx, y, 0.2, 1.0, cfg);
  CHECK(max_abs_diff(lhs, rhs) < 1e-9);
  CHECK(max_abs_diff(propagate(ctx, x, 0.4, 0.4, cfg), x) == 0.0);
  CHECK_THROWS_AS(propagate(ctx, x, 1.0, 0.5, cfg), DomainError);
}

TEST_CASE("a growing generator trips the contractivity check") {
  const TruncatedSpace s(0, 0);
  const ModelSpec m(SystemOperator::identity(s), {}, ScatteringMatrix(0, 0), "unstable");
  const GeneratorContext ctx{m, ObservableSpec::trivial(0, 0), FieldProfile::vacuum(0), TestFunction::zero(0)};
  EvolutionConfig cfg;
  cfg.t_end = 1.0;
  CHECK_THROWS_AS(evolve(ctx, DenseMatrix::identity(1), cfg), ContractivityError);
}

TEST_CASE("leakage companion for k != 0") {
  std::mt19937_64 rng(21);
  const TruncatedSpace s(4, 2);
  const GeneratorContext ctx =
      testing::dpo_context(fixed_params(), s, testing::random_test_function(rng, 3, 1.0, 2, 1.0), 10.0);
  EvolutionConfig cfg;
  cfg.t_end = 1.0;
  CHECK(evolve(ctx, vacuum(s), cfg).leakage.empty());
  cfg.leakage_companion = true;
  const EvolutionResult res = evolve(ctx, vacuum(s), cfg);
  CHECK(!res.leakage.empty());
  CHECK(res.leakage.size() == res.leakage_times.size());
  CHECK(res.max_leakage() > 0.0);
}

TEST_CASE("leakage band") {
  const TruncatedSpace s(4, 2);
  DenseMatrix rho(s.dim());
  rho(s.index(0, 0), s.index(0, 0)) = 0.5;
  rho(s.index(3, 0), s.index(3, 0)) = 0.25;
  rho(s.index(1, 1), s.index(1, 1)) = 0.125;
  rho(s.index(0, 2), s.index(0, 2)) = 0.125;
  CHECK(leakage(s, rho, 2) == 0.25 + 0.125 + 0.125);
  CHECK(leakage(s, rho, 1) == 0.125);
  CHECK(leakage(s, rho, 0) == 0.0);
  // a mode with cutoff 0 contributes no band
  const TruncatedSpace flat(3, 0);
  DenseMatrix r2(flat.dim());
  r2(0, 0) = 1.0;
  CHECK(leakage(flat, r2, 2) == 0.0);
}

TEST_CASE("initial state and configuration checks") {
  const TruncatedSpace s(2, 1);
  const GeneratorContext ctx = testing::dpo_context(fixed_params(), s, TestFunction::zero(3), 1.0);
  EvolutionConfig cfg;
  DenseMatrix bad = vacuum(s);
  bad *= 2.0;
  CHECK_THROWS_AS(evolve(ctx, bad, cfg), ValidationError);
  bad = vacuum(s);
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(evolve(ctx, bad, cfg), ValidationError);
  bad = DenseMatrix(s.dim());
  bad(0, 0) = 1.5;
  bad(1, 1) = -0.5;
  CHECK_THROWS_AS(evolve(ctx, bad, cfg), ValidationError);
  CHECK_THROWS_AS(evolve(ctx, DenseMatrix::identity(3), cfg), DimensionError);

  EvolutionConfig c = cfg;
  c.dt = -1.0;
  CHECK_THROWS_AS(evolve(ctx, vacuum(s), c), ConfigError);
  c = cfg;
  c.store_stride = 0;
  CHECK_THROWS_AS(evolve(ctx, vacuum(s), c), ConfigError);
  c = cfg;
  c.method = StepMethod::Adaptive;
  c.rtol = 0.0;
  CHECK_THROWS_AS(evolve(ctx, vacuum(s), c), ConfigError);
  c = cfg;
  c.t_end = std::nan("");
  CHECK_THROWS_AS(evolve(ctx, vacuum(s), c), ConfigError);
}

TEST_CASE("default step and eigenvalues") {
  const TruncatedSpace s(4, 2);
  const GeneratorContext ctx = testing::dpo_context(fixed_params(), s, TestFunction::zero(3), 1.0);
  const double dt = default_step(ctx, 2.0);
  CHECK(dt > 0.0);
  CHECK(dt < 0.1);
  DenseMatrix x(2);
  x(0, 0) = 1.0;
  x(1, 1) = -0.25;
  x(0, 1) = 1.0;  // Hermitian part has off-diagonal 1/2
  CHECK(smallest_eigenvalue(x) == doctest::Approx(0.375 - std::sqrt(0.625 * 0.625 + 0.25)));
}

TEST_CASE("scalar and vector kernels give the same trajectory") {
  std::mt19937_64 rng(3);
  const TruncatedSpace s(6, 3);
  const GeneratorContext ctx =
      testing::dpo_context(fixed_params(), s, testing::random_test_function(rng, 3, 1.0, 2, 1.0), 0.7);
  EvolutionConfig cfg;
  const kernels::Isa before = kernels::active().isa;
  kernels::select(kernels::Isa::Scalar);
  const cplx ref = evolve(ctx, vacuum(s), cfg).phi.back();
  for (const kernels::KernelTable* t : kernels::available_tables()) {
    kernels::select(t->isa);
    CHECK(std::abs(evolve(ctx, vacuum(s), cfg).phi.back() - ref) < 1e-13);
  }
  kernels::select(before);
}
