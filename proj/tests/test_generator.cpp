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

#include <numbers>

#include "qcm/errors.hpp"
#include "qcm/generator.hpp"
#include "test_support.hpp"

using namespace qcm;
using testing::literal_generator;

namespace {

SystemOperator random_sparse(const TruncatedSpace& s, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u;
  std::normal_distribution<double> g;
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < s.dim(); ++r)
    for (std::size_t c = 0; c < s.dim(); ++c)
      if (u(rng) < density) t.push_back({r, c, {g(rng), g(rng)}});
  return SystemOperator(s, std::move(t));
}

Eigen::MatrixXcd random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = {g(rng), g(rng)};
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(m).householderQ();
}

// Four channels with a non-diagonal S; R_2 is proportional to R_0 and R_3 vanishes.
GeneratorContext generic_context(std::mt19937_64& rng) {
  const TruncatedSpace s(3, 2);
  const SystemOperator R0 = random_sparse(s, 0.3, rng);
  std::vector<SystemOperator> R{R0, random_sparse(s, 0.3, rng), cplx(0.0, 2.0) * R0, SystemOperator::zero(s)};
  ModelSpec model(random_sparse(s, 0.4, rng), std::move(R), random_unitary(4, rng), "generic");
  std::vector<std::vector<TimeFunction>> h(2, std::vector<TimeFunction>(4));
  h[1][1] = TimeFunction::exponential(0.8, 0.3, 1.5);
  h[1][3] = TimeFunction::exponential(0.4, 0.3, 1.5);
  const ObservableSpec spec({{1.0, 0.0, 0.5, 0.0}, {0.0, 0.0, 0.0, 0.0}}, h,
                            {TimeFunction::constant({0.2, -0.1}), TimeFunction{}, TimeFunction::exponential(0.3, 0, 1),
                             TimeFunction{}},
                            {TimeFunction::constant(0.4), TimeFunction::constant(-0.2)});
  const FieldProfile f({TimeFunction::exponential(0.7, 0.1, -2.0), TimeFunction::constant({0.0, 0.3}), TimeFunction{},
                        TimeFunction::exponential(0.5, 1.0, 0.5)},
                       1.7);
  return {std::move(model), spec, f, testing::random_test_function(rng, 2, 2.0, 3, 2.0)};
}

}  // namespace

TEST_CASE("optimized generator equals the literal formula on the DPO") {
  std::mt19937_64 rng(11);
  const TruncatedSpace s(6, 4);
  for (int draw = 0; draw < 4; ++draw) {
    const DpoParams p = random_dpo_params(100 + draw);
    const GeneratorContext ctx = testing::dpo_context(p, s, testing::random_test_function(rng, 3, 2.0, 3, 3.0), 1.5);
    const Generator gen(ctx);
    CHECK(gen.channel_groups() == 4);
    for (double t : {0.0, 0.37, 1.2, 1.9}) {
      const DenseMatrix rho = testing::random_matrix(s.dim(), rng);
      const DenseMatrix want = literal_generator(ctx, t, rho);
      CHECK(max_abs_diff(gen.apply(t, rho), want) < 1e-12 * std::max(1.0, want.max_abs()));
    }
  }
}

TEST_CASE("optimized generator equals the literal formula with a general scattering matrix") {
  std::mt19937_64 rng(5);
  for (int draw = 0; draw < 3; ++draw) {
    const GeneratorContext ctx = generic_context(rng);
    const Generator gen(ctx);
    CHECK(gen.channel_groups() == 2);
    for (double t : {0.1, 0.8, 1.65, 1.8}) {
      const DenseMatrix rho = testing::random_matrix(ctx.model.space().dim(), rng);
      const DenseMatrix want = literal_generator(ctx, t, rho);
      CHECK(max_abs_diff(gen.apply(t, rho), want) < 1e-12 * std::max(1.0, want.max_abs()));
    }
  }
}

TEST_CASE("k = 0 reproduces the DPO master equation") {
  std::mt19937_64 rng(17);
  const TruncatedSpace s(8, 5);
  for (int draw = 0; draw < 3; ++draw) {
    const DpoParams p = random_dpo_params(200 + draw);
    const GeneratorContext ctx = testing::dpo_context(p, s, TestFunction::zero(3), 10.0);
    const Generator gen(ctx);
    const testing::MasterEquation rhs(p, s);
    for (int j = 0; j < 5; ++j) {
      const double t = 0.9 * j;
      const DenseMatrix rho = testing::random_hermitian(s.dim(), rng);
      const Eigen::MatrixXcd want = rhs(t, testing::to_eigen(rho));
      CHECK((testing::to_eigen(gen.apply(t, rho)) - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("k = 0 generator is trace annihilating and Hermiticity preserving") {
  std::mt19937_64 rng(2);
  const TruncatedSpace s(5, 3);
  const GeneratorContext ctx = testing::dpo_context(random_dpo_params(9), s, TestFunction::zero(3), 10.0);
  const DenseMatrix rho = testing::random_hermitian(s.dim(), rng);
  const DenseMatrix out = apply_generator(ctx, 0.4, rho);
  CHECK(out.hermiticity_deviation() < 1e-12);
  // the trace leaks only through the top levels, where the a^dag and b^dag channels are cut
  DenseMatrix inner_rho(s.dim());
  for (std::size_t r = 0; r < s.dim(); ++r)
    for (std::size_t c = 0; c < s.dim(); ++c) {
      const auto [n, m] = s.levels(r);
      const auto [n2, m2] = s.levels(c);
      if (n < s.n_max() && m < s.m_max() && n2 < s.n_max() && m2 < s.m_max()) inner_rho(r, c) = rho(r, c);
    }
  CHECK(std::abs(apply_generator(ctx, 0.4, rho).trace()) > 1e-6);
  CHECK(std::abs(apply_generator(ctx, 0.4, inner_rho).trace()) < 1e-12);
}

TEST_CASE("system-free generator is the closed-form integrand") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int draw = 0; draw < 10; ++draw) {
    const double kc = 2.0 * u(rng), kh = 2.0 * u(rng);
    const cplx b0{u(rng), u(rng)}, f0{u(rng), u(rng)}, f1{u(rng), u(rng)};
    const TimeFunction h = TimeFunction::exponential(1.0 + u(rng), u(rng), 0.0);
    const double c0 = u(rng), c1 = u(rng);
    const ObservableSpec spec({{1.0, 0.0}, {0.0, 0.0}}, {{TimeFunction{}, TimeFunction{}}, {TimeFunction{}, h}},
                              {TimeFunction::constant(b0), TimeFunction{}},
                              {TimeFunction::constant(c0), TimeFunction::constant(c1)});
    const FieldProfile f({TimeFunction::constant(f0), TimeFunction::constant(f1)});
    const GeneratorContext ctx{system_free_model(2), spec, f, TestFunction::constant({kc, kh}, 1.0)};
    const cplx g = apply_generator(ctx, 0.5, DenseMatrix::identity(1))(0, 0);

    const cplx I{0.0, 1.0};
    const cplx hv = h(0.5);
    const cplx want = -0.5 * kh * kh * std::norm(hv) +
                      I * (kc * c0 + kh * (c1 + std::conj(hv) * f1 + std::conj(f1) * hv)) +
                      std::norm(f0 + b0) * (std::polar(1.0, kc) - 1.0);
    CHECK(std::abs(g - want) < 1e-13);
  }
}

TEST_CASE("norm bound dominates the action") {
  std::mt19937_64 rng(31);
  const TruncatedSpace s(5, 3);
  const GeneratorContext ctx =
      testing::dpo_context(random_dpo_params(3), s, testing::random_test_function(rng, 3, 1.0, 2, 2.0), 1.0);
  const Generator gen(ctx);
  const double bound = gen.norm_bound(0.3, 0.3);
  auto frob = [](const DenseMatrix& x) {
    double v = 0.0;
    for (cplx z : x.values()) v += std::norm(z);
    return std::sqrt(v);
  };
  for (int j = 0; j < 10; ++j) {
    const DenseMatrix rho = testing::random_matrix(s.dim(), rng);
    CHECK(frob(gen.apply(0.3, rho)) <= bound * frob(rho));
  }
}

TEST_CASE("scalar and vector kernels give the same generator") {
  std::mt19937_64 rng(41);
  const TruncatedSpace s(7, 3);
  const GeneratorContext ctx =
      testing::dpo_context(random_dpo_params(4), s, testing::random_test_function(rng, 3, 1.0, 2, 2.0), 1.0);
  const Generator gen(ctx);
  const DenseMatrix rho = testing::random_matrix(s.dim(), rng);
  const auto tables = kernels::available_tables();
  const kernels::Isa before = kernels::active().isa;
  kernels::select(kernels::Isa::Scalar);
  const DenseMatrix ref = gen.apply(0.2, rho);
  for (const kernels::KernelTable* t : tables) {
    kernels::select(t->isa);
    CHECK(max_abs_diff(gen.apply(0.2, rho), ref) < 1e-12 * ref.max_abs());
  }
  kernels::select(before);
}

TEST_CASE("context validation") {
  const TruncatedSpace s(2, 1);
  const DpoParams p = random_dpo_params(1);
  GeneratorContext ctx = testing::dpo_context(p, s, TestFunction::zero(3), 1.0);
  CHECK_NOTHROW(ctx.validate());
  ctx.k = TestFunction::zero(2);
  CHECK_THROWS_AS(Generator{ctx}, DimensionError);
  ctx.k = TestFunction::zero(3);
  ctx.field = FieldProfile::vacuum(7);
  CHECK_THROWS_AS(Generator{ctx}, DimensionError);

  ScatteringMatrix S = ScatteringMatrix::Identity(8, 8);
  S(0, 0) = 1.5;
  ctx.field = FieldProfile::vacuum(8);
  ctx.model = ModelSpec(ctx.model.K(), ctx.model.R(), S);
  CHECK_THROWS_AS(Generator{ctx}, ValidationError);

  DpoParams q = p;
  q.beta[1] = 0.0;
  CHECK_THROWS_AS(laser_field(q, 1.0), ValidationError);
  CHECK_THROWS_AS(FieldProfile({TimeFunction{}}, 0.0), ValidationError);
  CHECK_THROWS_AS(apply_generator(testing::dpo_context(p, s, TestFunction::zero(3), 1.0), 0.0, DenseMatrix(5)),
                  DimensionError);
}

TEST_CASE("laser field and breakpoints") {
  const DpoParams p = random_dpo_params(8);
  const FieldProfile f = laser_field(p, 2.0);
  const cplx want = cplx(0, 1) * p.lambda_drive * std::exp(cplx(0, -2.0 * p.omega_c * 0.7)) / std::conj(p.beta[1]);
  CHECK(std::abs(f.at(0.7)[3] - want) < 1e-14);
  CHECK(f.at(0.7)[0] == cplx(0.0));
  CHECK(f.at(2.0).norm() == 0.0);
  CHECK(f.at(2.0, 1.99).norm() > 0.0);

  const TruncatedSpace s(1, 1);
  const GeneratorContext ctx = testing::dpo_context(p, s, TestFunction({0.0, 0.5, 1.0}, {{1, 0, 0}, {0, 1, 0}}), 2.0);
  CHECK(ctx.breakpoints(3.0) == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(ctx.breakpoints(1.5) == std::vector<double>{0.5, 1.0});
  const GeneratorContext sh = ctx.shifted(0.75);
  CHECK(sh.breakpoints(3.0) == std::vector<double>{0.25, 1.25});
  CHECK(std::abs(sh.field.at(0.1)[3] - ctx.field.at(0.85)[3]) < 1e-14);
}
