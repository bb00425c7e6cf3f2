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

#include <random>
#include <vector>

#include "qcm/errors.hpp"
#include "qcm/kernels.hpp"

using qcm::kernels::cplx;
using qcm::kernels::CsrView;
using qcm::kernels::Isa;
using qcm::kernels::KernelTable;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct RandomCsr {
  std::vector<std::uint32_t> row_ptr{0}, col;
  std::vector<cplx> val;
  CsrView view(std::size_t rows) const { return {rows, row_ptr.data(), col.data(), val.data()}; }
};

RandomCsr random_csr(std::size_t n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u;
  std::normal_distribution<double> g;
  RandomCsr m;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c)
      if (u(rng) < density) {
        m.col.push_back(std::uint32_t(c));
        m.val.push_back({g(rng), g(rng)});
      }
    m.row_ptr.push_back(std::uint32_t(m.col.size()));
  }
  return m;
}

const KernelTable* vector_table() {
  for (const KernelTable* t : qcm::kernels::available_tables())
    if (t->isa != Isa::Scalar) return t;
  return nullptr;
}

const std::size_t kSizes[] = {0, 1, 2, 3, 5, 7, 8, 13, 64, 117, 1000};

}  // namespace

TEST_CASE("scalar table is always available and listed first") {
  const auto tables = qcm::kernels::available_tables();
  REQUIRE(!tables.empty());
  CHECK(tables.front()->isa == Isa::Scalar);
  CHECK(qcm::kernels::scalar_table().name == "scalar");
}

TEST_CASE("scalar kernels compute the documented operations") {
  const KernelTable& s = qcm::kernels::scalar_table();
  std::vector<cplx> x{{1, 2}, {3, -1}}, y{{0, 1}, {2, 2}};
  s.zaxpy(2, {0, 1}, x.data(), y.data());
  CHECK(y[0] == cplx(-2, 2));
  CHECK(y[1] == cplx(3, 5));
  s.zscal(2, 2.0, y.data());
  CHECK(y[1] == cplx(6, 10));
  s.zaxpby(2, 1.0, x.data(), {0, 1}, y.data());
  CHECK(y[0] == cplx(-3, -2));
  // [[1, i], [0, 2]]^dagger = [[1, 0], [-i, 2]]
  std::vector<cplx> m{{1, 0}, {0, 1}, {0, 0}, {2, 0}}, out(4);
  s.adjoint_acc(2, m.data(), 1.0, out.data());
  CHECK(out[1] == cplx(0, 0));
  CHECK(out[2] == cplx(0, -1));
  CHECK(s.max_abs_diff(4, m.data(), out.data()) == doctest::Approx(1.0));
}

TEST_CASE("vector kernels match the scalar reference") {
  const KernelTable* v = vector_table();
  if (v == nullptr) {
    MESSAGE("no vector ISA on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& s = qcm::kernels::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto x = random_vec(n, rng);
    const auto y0 = random_vec(n, rng);
    const cplx a{0.3, -1.7}, b{-0.4, 0.25};

    auto ys = y0, yv = y0;
    s.zaxpy(n, a, x.data(), ys.data());
    v->zaxpy(n, a, x.data(), yv.data());
    CHECK(max_diff(ys, yv) < 1e-14);

    ys = y0, yv = y0;
    s.zaxpby(n, a, x.data(), b, ys.data());
    v->zaxpby(n, a, x.data(), b, yv.data());
    CHECK(max_diff(ys, yv) < 1e-14);

    ys = y0, yv = y0;
    s.zscal(n, a, ys.data());
    v->zscal(n, a, yv.data());
    CHECK(max_diff(ys, yv) < 1e-14);

    CHECK(s.max_abs_diff(n, x.data(), y0.data()) == doctest::Approx(v->max_abs_diff(n, x.data(), y0.data())).epsilon(1e-15));

    const auto sq = random_vec(n * n, rng);
    auto as = random_vec(n * n, rng);
    auto av = as;
    s.adjoint_acc(n, sq.data(), a, as.data());
    v->adjoint_acc(n, sq.data(), a, av.data());
    CHECK(max_diff(as, av) < 1e-14);

    for (std::size_t ncols : {std::size_t(1), std::size_t(3), n}) {
      const RandomCsr m = random_csr(n, 0.3, rng);
      const auto xm = random_vec(n * ncols, rng);
      auto ms = random_vec(n * ncols, rng);
      auto mv = ms;
      s.spmm_acc(m.view(n), xm.data(), ncols, a, ms.data());
      v->spmm_acc(m.view(n), xm.data(), ncols, a, mv.data());
      CHECK(max_diff(ms, mv) < 1e-12);
    }
  }
}

TEST_CASE("select pins the active table") {
  qcm::kernels::select(Isa::Scalar);
  CHECK(qcm::kernels::active().isa == Isa::Scalar);
  if (const KernelTable* v = vector_table()) {
    qcm::kernels::select(v->isa);
    CHECK(qcm::kernels::active().isa == v->isa);
  } else {
    CHECK_THROWS_AS(qcm::kernels::select(Isa::Avx2), qcm::DomainError);
  }
  CHECK(qcm::kernels::isa_name(Isa::Avx2) == "avx2");
}
