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

#include "qcm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Sample times for checking pointwise identities on h: every piece of every
// piecewise function plus a uniform grid long enough to cover a few periods
// of the exponentials.
std::vector<double> probe_times(const std::vector<double>& jumps) {
  std::vector<double> t;
  double horizon = 10.0;
  for (double j : jumps)
    if (std::isfinite(j)) horizon = std::max(horizon, 2.0 * std::abs(j));
  constexpr int kGrid = 257;
  for (int i = 0; i < kGrid; ++i) t.push_back(horizon * i / (kGrid - 1));
  for (std::size_t i = 0; i + 1 < jumps.size(); ++i) t.push_back(0.5 * (jumps[i] + jumps[i + 1]));
  for (double j : jumps) t.push_back(j);
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// ObservableSpec

ObservableSpec::ObservableSpec(std::vector<std::vector<double>> eigenvalues,
                               std::vector<std::vector<TimeFunction>> h, std::vector<TimeFunction> b,
                               std::vector<TimeFunction> c)
    : d_(b.size()), eig_(std::move(eigenvalues)), h_(std::move(h)), b_(std::move(b)), c_(std::move(c)) {
  const std::size_t m = eig_.size();
  if (h_.size() != m || c_.size() != m) throw DimensionError("observable spec: h and c need one row per observable");
  for (std::size_t a = 0; a < m; ++a) {
    if (eig_[a].size() != d_ || h_[a].size() != d_) {
      throw DimensionError("observable spec: every B^alpha and h^alpha needs d = " + std::to_string(d_) +
                           " components");
    }
    for (double e : eig_[a])
      if (!std::isfinite(e)) throw ValidationError("observable eigenvalues must be finite");
  }

  std::ostringstream err;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t i = 0; i < d_; ++i) {
      if (eig_[a][i] == 0.0) continue;
      for (std::size_t be = 0; be < m; ++be) {
        if (!h_[be][i].is_identically_zero()) {
          err << "  B^" << a + 1 << " h^" << be + 1 << " != 0 on channel " << i << "\n";
        }
      }
    }
  for (std::size_t a = 0; a < m; ++a)
    if (!c_[a].is_real()) err << "  c^" << a + 1 << " is not real-valued\n";

  const std::vector<double> times = probe_times(discontinuities());
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t be = a + 1; be < m; ++be) {
      double worst = 0.0, scale = 0.0;
      for (double t : times) {
        cplx ip = 0.0;
        for (std::size_t i = 0; i < d_; ++i) {
          const cplx ha = h_[a][i](t), hb = h_[be][i](t);
          ip += std::conj(ha) * hb;
          scale = std::max(scale, std::abs(ha) * std::abs(hb));
        }
        worst = std::max(worst, std::abs(ip.imag()));
      }
      if (worst > 1e-12 * std::max(1.0, scale)) {
        err << "  Im<h^" << a + 1 << "|h^" << be + 1 << "> != 0 (max " << worst << ")\n";
      }
    }
  const std::string msg = err.str();
  if (!msg.empty()) throw ValidationError("invalid observable data:\n" + msg);
}

ObservableSpec ObservableSpec::trivial(std::size_t m, std::size_t d) {
  return ObservableSpec(std::vector<std::vector<double>>(m, std::vector<double>(d, 0.0)),
                        std::vector<std::vector<TimeFunction>>(m, std::vector<TimeFunction>(d)),
                        std::vector<TimeFunction>(d), std::vector<TimeFunction>(m));
}

ObservableKind ObservableSpec::kind(std::size_t alpha) const {
  bool b_zero = true, b_binary = true, h_zero = true;
  for (std::size_t i = 0; i < d_; ++i) {
    const double e = eig_.at(alpha)[i];
    if (e != 0.0) b_zero = false;
    if (e != 0.0 && e != 1.0) b_binary = false;
    if (!h_[alpha][i].is_identically_zero()) h_zero = false;
  }
  if (b_zero && h_zero) return ObservableKind::Null;
  if (b_zero) return ObservableKind::Diffusive;
  if (b_binary && h_zero) return ObservableKind::Counting;
  return ObservableKind::Mixed;
}

std::vector<double> ObservableSpec::discontinuities() const {
  std::vector<double> out;
  auto add = [&](const TimeFunction& f) {
    for (double x : f.discontinuities()) out.push_back(x);
  };
  for (const auto& row : h_)
    for (const TimeFunction& f : row) add(f);
  for (const TimeFunction& f : b_) add(f);
  for (const TimeFunction& f : c_) add(f);
  return sorted_unique(std::move(out));
}

ObservableSpec ObservableSpec::shifted(double s) const {
  ObservableSpec out = *this;
  for (auto& row : out.h_)
    for (TimeFunction& f : row) f = f.shifted(s);
  for (TimeFunction& f : out.b_) f = f.shifted(s);
  for (TimeFunction& f : out.c_) f = f.shifted(s);
  return out;
}

// ---------------------------------------------------------------------------
// TestFunction

TestFunction::TestFunction(std::vector<double> breakpoints, std::vector<std::vector<double>> values)
    : bp_(std::move(breakpoints)), val_(std::move(values)) {
  if (bp_.empty() && val_.empty()) return;
  if (bp_.size() != val_.size() + 1 || val_.empty()) {
    throw ValidationError("test function needs n+1 breakpoints for n interval values (n >= 1)");
  }
  if (bp_.front() != 0.0) throw ValidationError("test function breakpoints must start at t_0 = 0");
  for (std::size_t i = 1; i < bp_.size(); ++i)
    if (!(bp_[i] > bp_[i - 1])) throw ValidationError("test function breakpoints must be strictly increasing");
  m_ = val_.front().size();
  for (const auto& v : val_) {
    if (v.size() != m_) throw DimensionError("test function values must all have m components");
    for (double x : v)
      if (!std::isfinite(x)) throw ValidationError("test function values must be finite");
  }
}

TestFunction TestFunction::zero(std::size_t m) {
  TestFunction k;
  k.m_ = m;
  return k;
}

TestFunction TestFunction::constant(std::vector<double> kappa, double t) {
  if (!(t > 0.0)) return zero(kappa.size());
  return TestFunction({0.0, t}, {std::move(kappa)});
}

bool TestFunction::is_zero() const {
  for (const auto& v : val_)
    for (double x : v)
      if (x != 0.0) return false;
  return true;
}

std::vector<double> TestFunction::at(double anchor) const {
  if (bp_.empty() || anchor < bp_.front() || anchor >= bp_.back()) return std::vector<double>(m_, 0.0);
  const auto it = std::upper_bound(bp_.begin(), bp_.end(), anchor);
  return val_[static_cast<std::size_t>(it - bp_.begin()) - 1];
}

TestFunction TestFunction::shifted(double s) const {
  if (bp_.empty() || s >= bp_.back()) return zero(m_);
  std::vector<double> bp{0.0};
  for (double t : bp_)
    if (t - s > 0.0) bp.push_back(t - s);
  std::vector<std::vector<double>> val;
  for (std::size_t l = 0; l + 1 < bp.size(); ++l) val.push_back(at(0.5 * (bp[l] + bp[l + 1]) + s));
  TestFunction out(std::move(bp), std::move(val));
  out.m_ = m_;
  return out;
}

TestFunction TestFunction::operator-() const {
  TestFunction out = *this;
  for (auto& v : out.val_)
    for (double& x : v) x = -x;
  return out;
}

TestFunction operator+(const TestFunction& a, const TestFunction& b) {
  if (a.m_ != b.m_) throw DimensionError("test functions with different observable counts");
  if (a.bp_.empty()) return b;
  if (b.bp_.empty()) return a;
  std::vector<double> bp = a.bp_;
  bp.insert(bp.end(), b.bp_.begin(), b.bp_.end());
  bp = sorted_unique(std::move(bp));
  std::vector<std::vector<double>> val;
  for (std::size_t l = 0; l + 1 < bp.size(); ++l) {
    const double mid = 0.5 * (bp[l] + bp[l + 1]);
    std::vector<double> v = a.at(mid);
    const std::vector<double> w = b.at(mid);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += w[i];
    val.push_back(std::move(v));
  }
  return TestFunction(std::move(bp), std::move(val));
}

// ---------------------------------------------------------------------------
// Scalars

Eigen::VectorXcd S_of_kappa(const ObservableSpec& spec, const std::vector<double>& kappa) {
  if (kappa.size() != spec.observables()) throw DimensionError("kappa has the wrong number of observables");
  const std::size_t d = spec.channels();
  Eigen::VectorXcd s(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    double phase = 0.0;
    for (std::size_t a = 0; a < kappa.size(); ++a) phase += kappa[a] * spec.eigenvalue(a, i);
    s[static_cast<Eigen::Index>(i)] = std::polar(1.0, phase);
  }
  return s;
}

Eigen::VectorXcd r_of_k(const ObservableSpec& spec, const std::vector<double>& kappa, double t, double anchor) {
  const Eigen::VectorXcd s = S_of_kappa(spec, kappa);
  const cplx I{0.0, 1.0};
  Eigen::VectorXcd r(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    cplx v = 0.0;
    for (std::size_t a = 0; a < kappa.size(); ++a)
      if (kappa[a] != 0.0) v += kappa[a] * spec.h(a, ui).eval(t, anchor);
    r[i] = I * v + (s[i] - 1.0) * spec.b(ui).eval(t, anchor);
  }
  return r;
}

cplx C_scalar(const ObservableSpec& spec, const std::vector<double>& kappa, double t, double anchor) {
  const Eigen::VectorXcd s = S_of_kappa(spec, kappa);
  const std::size_t d = spec.channels(), m = spec.observables();
  cplx bsb = 0.0;
  for (std::size_t i = 0; i < d; ++i) bsb += std::norm(spec.b(i).eval(t, anchor)) * (s[Eigen::Index(i)] - 1.0);
  double kc = 0.0;
  for (std::size_t a = 0; a < m; ++a) kc += kappa[a] * spec.c(a).eval(t, anchor).real();
  // sum_i |sum_alpha kappa_alpha h^alpha_i|^2 = sum kappa_a <h^a|h^b> kappa_b (the Im part cancels by symmetry)
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    cplx v = 0.0;
    for (std::size_t a = 0; a < m; ++a)
      if (kappa[a] != 0.0) v += kappa[a] * spec.h(a, i).eval(t, anchor);
    quad += std::norm(v);
  }
  return bsb + cplx{0.0, kc} - 0.5 * quad;
}

Eigen::MatrixXcd G_coefficients(const ObservableSpec& spec, const std::vector<double>& kappa, double t) {
  const auto d = static_cast<Eigen::Index>(spec.channels());
  const Eigen::VectorXcd s = S_of_kappa(spec, kappa);
  const Eigen::VectorXcd r = r_of_k(spec, kappa, t);
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(d + 1, d + 1);
  G(0, 0) = C_scalar(spec, kappa, t);
  for (Eigen::Index j = 0; j < d; ++j) {
    G(j + 1, 0) = r[j];
    // -<r | S z_j> with S diagonal
    G(0, j + 1) = -std::conj(r[j]) * s[j];
    G(j + 1, j + 1) = s[j] - 1.0;
  }
  return G;
}

ObservableSpec dpo_observables(double theta3, double omega_c) {
  constexpr std::size_t d = 8;
  std::vector<std::vector<double>> eig(3, std::vector<double>(d, 0.0));
  eig[0][0] = 1.0;
  eig[1][1] = 1.0;
  std::vector<std::vector<TimeFunction>> h(3, std::vector<TimeFunction>(d));
  h[2][2] = TimeFunction::exponential(1.0, theta3, -omega_c);
  return ObservableSpec(std::move(eig), std::move(h), std::vector<TimeFunction>(d), std::vector<TimeFunction>(3));
}

}  // namespace qcm
