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

#include "qcm/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
constexpr cplx I{0.0, 1.0};

std::vector<double> pieces(const ObservableSpec& spec, const FieldProfile& f, const TestFunction& k, double t) {
  std::vector<double> cut{0.0, t};
  auto add = [&](const std::vector<double>& xs) {
    for (double x : xs)
      if (x > 0.0 && x < t) cut.push_back(x);
  };
  add(k.breakpoints());
  add(f.discontinuities());
  add(spec.discontinuities());
  std::sort(cut.begin(), cut.end());
  cut.erase(std::unique(cut.begin(), cut.end()), cut.end());
  return cut;
}

// Frozen data of one piece, evaluated at (time, anchor).
struct Coefficients {
  Vec lambda, s, b;
  std::vector<double> kappa;
  std::vector<Vec> h;  // per observable
  std::vector<double> c;
};

Coefficients coefficients(const ObservableSpec& spec, const FieldProfile& f, const TestFunction& k, double time,
                          double anchor) {
  const auto d = static_cast<Eigen::Index>(spec.channels());
  const std::size_t m = spec.observables();
  Coefficients co;
  co.kappa = k.at(anchor);
  co.lambda = Vec::Zero(d);
  if (anchor < f.window_end())
    for (Eigen::Index i = 0; i < d; ++i) co.lambda[i] = f.component(std::size_t(i)).eval(time, anchor);
  co.s.resize(d);
  co.b.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double phase = 0.0;
    for (std::size_t a = 0; a < m; ++a) phase += co.kappa[a] * spec.eigenvalues()[a][std::size_t(i)];
    co.s[i] = std::exp(I * phase);
    co.b[i] = spec.b(std::size_t(i)).eval(time, anchor);
  }
  for (std::size_t a = 0; a < m; ++a) {
    Vec ha(d);
    for (Eigen::Index i = 0; i < d; ++i) ha[i] = spec.h(a, std::size_t(i)).eval(time, anchor);
    co.h.push_back(ha);
    co.c.push_back(spec.c(a).eval(time, anchor).real());
  }
  return co;
}

cplx scalar_C(const Coefficients& co) {
  cplx v = 0.0;
  const std::size_t m = co.kappa.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) v -= 0.5 * co.kappa[a] * co.kappa[b] * co.h[a].dot(co.h[b]);
  for (std::size_t a = 0; a < m; ++a) v += I * co.kappa[a] * co.c[a];
  v += co.b.dot((co.s.array() - 1.0).matrix().cwiseProduct(co.b));
  return v;
}

// r(sign * kappa)
Vec r_vector(const Coefficients& co, double sign) {
  const Eigen::Index d = co.s.size();
  Vec r = Vec::Zero(d);
  for (std::size_t a = 0; a < co.kappa.size(); ++a) r += I * (sign * co.kappa[a]) * co.h[a];
  const Vec s = sign > 0 ? co.s : Vec(co.s.conjugate());
  return r + (s.array() - 1.0).matrix().cwiseProduct(co.b);
}

Mat dense(const SystemOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  Mat m = Mat::Zero(n, n);
  for (const Triplet& t : op.triplets()) m(Eigen::Index(t.row), Eigen::Index(t.col)) += t.value;
  return m;
}

struct DenseModel {
  Mat K;
  std::vector<Mat> R;
  Mat S;
};

DenseModel densify(const ModelSpec& model) {
  DenseModel dm{dense(model.K()), {}, model.S()};
  for (const SystemOperator& r : model.R()) dm.R.push_back(dense(r));
  return dm;
}

// Node operators of the frozen generator: left K(f, r(-k)), right K(f, r(k)), B_i, s_i, C.
struct FrozenOps {
  Mat KL, KR;
  std::vector<Mat> B;
  Vec s;
  cplx C;
};

FrozenOps frozen_ops(const DenseModel& dm, const Coefficients& co) {
  const Eigen::Index n = dm.K.rows();
  const Mat id = Mat::Identity(n, n);
  const Vec mu = dm.S * co.lambda;
  FrozenOps ops;
  ops.s = co.s;
  ops.C = scalar_C(co);
  Mat base = dm.K - 0.5 * co.lambda.squaredNorm() * id;
  for (std::size_t i = 0; i < dm.R.size(); ++i) {
    base -= mu[Eigen::Index(i)] * dm.R[i].adjoint();
    ops.B.push_back(dm.R[i] + mu[Eigen::Index(i)] * id);
  }
  const Vec rm = r_vector(co, -1.0), rp = r_vector(co, 1.0);
  ops.KL = base;
  ops.KR = base;
  for (std::size_t i = 0; i < ops.B.size(); ++i) {
    ops.KL += std::conj(rm[Eigen::Index(i)]) * ops.B[i];
    ops.KR += std::conj(rp[Eigen::Index(i)]) * ops.B[i];
  }
  return ops;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

cplx system_free_charfunc(const ObservableSpec& spec, const FieldProfile& f, const TestFunction& k, double t) {
  if (spec.channels() != f.channels() || spec.observables() != k.observables()) {
    throw DimensionError("system_free_charfunc: observable, field and test-function sizes disagree");
  }
  if (t <= 0.0) return 1.0;
  const std::vector<double> cut = pieces(spec, f, k, t);
  cplx total = 0.0;
  for (std::size_t p = 0; p + 1 < cut.size(); ++p) {
    const double a = cut[p], b = cut[p + 1], anchor = 0.5 * (a + b);
    auto integrand = [&](double s) {
      const Coefficients co = coefficients(spec, f, k, s, anchor);
      cplx v = 0.0;
      const std::size_t m = co.kappa.size();
      for (std::size_t x = 0; x < m; ++x) {
        for (std::size_t y = 0; y < m; ++y) v -= 0.5 * co.kappa[x] * co.kappa[y] * co.h[x].dot(co.h[y]);
        v += I * co.kappa[x] * (co.c[x] + co.h[x].dot(co.lambda) + co.lambda.dot(co.h[x]));
      }
      const Vec fb = co.lambda + co.b;
      v += fb.dot((co.s.array() - 1.0).matrix().cwiseProduct(fb));
      return v;
    };
    double err_re = 0.0, err_im = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double re = GK::integrate([&](double s) { return integrand(s).real(); }, a, b, 15, 1e-12, &err_re);
    const double im = GK::integrate([&](double s) { return integrand(s).imag(); }, a, b, 15, 1e-12, &err_im);
    const double scale = std::max(1.0, std::abs(cplx{re, im}));
    if (std::max(err_re, err_im) > 1e-11 * scale) {
      std::ostringstream os;
      os << "system_free_charfunc: quadrature on (" << a << ", " << b << ") did not converge (error estimate "
         << std::max(err_re, err_im) << ")";
      throw IntegrationError(os.str());
    }
    total += cplx{re, im};
  }
  return std::exp(total);
}

DenseMatrix dense_expm_propagate(const GeneratorContext& ctx, const DenseMatrix& rho0, double t) {
  const auto n = static_cast<Eigen::Index>(ctx.model.space().dim());
  if (n > 12) throw DomainError("dense_expm_propagate supports dim <= 12, got " + std::to_string(n));
  if (rho0.dim() != std::size_t(n)) throw DimensionError("dense_expm_propagate: state dimension mismatch");
  const DenseModel dm = densify(ctx.model);
  const Mat id = Mat::Identity(n, n);

  // Row-major vec: vec(A X B) = (A kron B^T) vec(X).
  Vec v(n * n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) v[r * n + c] = rho0(std::size_t(r), std::size_t(c));

  if (t > 0.0) {
    const std::vector<double> cut = pieces(ctx.spec, ctx.field, ctx.k, t);
    for (std::size_t p = 0; p + 1 < cut.size(); ++p) {
      const double mid = 0.5 * (cut[p] + cut[p + 1]);
      const FrozenOps ops = frozen_ops(dm, coefficients(ctx.spec, ctx.field, ctx.k, mid, mid));
      Mat L = kron(ops.KL, id) + kron(id, ops.KR.conjugate()) + ops.C * Mat::Identity(n * n, n * n);
      for (std::size_t i = 0; i < ops.B.size(); ++i) L += ops.s[Eigen::Index(i)] * kron(ops.B[i], ops.B[i].conjugate());
      const Mat step = (L * (cut[p + 1] - cut[p])).exp();
      v = step * v;
    }
  }
  DenseMatrix out(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(std::size_t(r), std::size_t(c)) = v[r * n + c];
  return out;
}

double duality_check(const GeneratorContext& ctx, double t, const SystemOperator& X, const DenseMatrix& tau,
                     const EvolutionConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(ctx.model.space().dim());
  if (X.dim() != std::size_t(n) || tau.dim() != std::size_t(n)) throw DimensionError("duality_check: dimension mismatch");
  const DenseModel dm = densify(ctx.model);

  // Heisenberg side: dX/ds = -H_s[X], H_s[X] = KR^dag X + X KL + sum s_i B_i^dag X B_i + C X.
  auto heis = [&](double s, double anchor, const Mat& x) {
    const FrozenOps ops = frozen_ops(dm, coefficients(ctx.spec, ctx.field, ctx.k, s, anchor));
    Mat y = ops.KR.adjoint() * x + x * ops.KL + ops.C * x;
    for (std::size_t i = 0; i < ops.B.size(); ++i) y += ops.s[Eigen::Index(i)] * ops.B[i].adjoint() * x * ops.B[i];
    return y;
  };

  Mat x = dense(X);
  if (t > 0.0) {
    const std::vector<double> cut = pieces(ctx.spec, ctx.field, ctx.k, t);
    for (std::size_t p = cut.size() - 1; p > 0; --p) {
      const double a = cut[p - 1], b = cut[p], anchor = 0.5 * (a + b);
      const FrozenOps probe = frozen_ops(dm, coefficients(ctx.spec, ctx.field, ctx.k, anchor, anchor));
      double bound = probe.KL.norm() + probe.KR.norm() + std::abs(probe.C);
      for (const Mat& B : probe.B) bound += B.squaredNorm();
      const auto steps = static_cast<int>(std::max(64.0, std::ceil((b - a) * bound / 0.01)));
      const double h = (b - a) / steps;
      for (int j = 0; j < steps; ++j) {
        const double s = b - j * h;  // backwards from b to a
        const Mat k1 = -heis(s, anchor, x);
        const Mat k2 = -heis(s - 0.5 * h, anchor, x - 0.5 * h * k1);
        const Mat k3 = -heis(s - 0.5 * h, anchor, x - 0.5 * h * k2);
        const Mat k4 = -heis(s - h, anchor, x - h * k3);
        x -= (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
  }
  std::vector<Triplet> xt;
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) xt.push_back({std::size_t(r), std::size_t(c), x(r, c)});
  const cplx lhs = trace_product(SystemOperator(X.space(), std::move(xt)), tau);
  const DenseMatrix rho_t = propagate(ctx, tau, 0.0, t, cfg);
  return std::abs(lhs - trace_product(X, rho_t));
}

}  // namespace qcm
