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

#include "qcm/time_function.hpp"

#include <algorithm>
#include <cmath>

#include "qcm/errors.hpp"

namespace qcm {

TimeFunction TimeFunction::constant(cplx value) {
  TimeFunction f;
  f.form_ = Constant{value};
  return f;
}

TimeFunction TimeFunction::exponential(cplx amplitude, double phase, double omega) {
  TimeFunction f;
  f.form_ = Exponential{amplitude, phase, omega};
  return f;
}

TimeFunction TimeFunction::table(std::vector<double> breakpoints, std::vector<cplx> values) {
  if (breakpoints.size() != values.size() + 1 || values.empty()) {
    throw ValidationError("table function needs n+1 breakpoints for n values (n >= 1)");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw ValidationError("table function breakpoints must be strictly increasing");
    }
  }
  for (const cplx& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ValidationError("table function values must be finite");
    }
  }
  TimeFunction f;
  f.form_ = Table{std::move(breakpoints), std::move(values)};
  return f;
}

TimeFunction TimeFunction::windowed(double start, double end) const {
  if (!(end > start)) throw ValidationError("window end must exceed window start");
  TimeFunction f = *this;
  f.window_start_ = std::max(window_start_, start);
  f.window_end_ = std::min(window_end_, end);
  if (!(f.window_end_ > f.window_start_)) {
    f.form_ = Constant{};
    f.window_start_ = -std::numeric_limits<double>::infinity();
    f.window_end_ = std::numeric_limits<double>::infinity();
  }
  return f;
}

cplx TimeFunction::eval(double t, double anchor) const {
  if (anchor < window_start_ || anchor >= window_end_) return 0.0;
  return std::visit(
      [&](const auto& form) -> cplx {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return form.value;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return form.amplitude * std::polar(1.0, form.phase + form.omega * t);
        } else {
          const auto& bp = form.breakpoints;
          if (anchor < bp.front() || anchor >= bp.back()) return 0.0;
          const auto it = std::upper_bound(bp.begin(), bp.end(), anchor);
          return form.values[static_cast<std::size_t>(it - bp.begin()) - 1];
        }
      },
      form_);
}

TimeFunction TimeFunction::shifted(double s) const {
  TimeFunction f = *this;
  f.window_start_ -= s;
  f.window_end_ -= s;
  if (auto* e = std::get_if<Exponential>(&f.form_)) {
    e->phase += e->omega * s;
  } else if (auto* tab = std::get_if<Table>(&f.form_)) {
    for (double& b : tab->breakpoints) b -= s;
  }
  return f;
}

std::vector<double> TimeFunction::discontinuities() const {
  std::vector<double> out;
  if (std::isfinite(window_start_)) out.push_back(window_start_);
  if (std::isfinite(window_end_)) out.push_back(window_end_);
  if (const auto* tab = std::get_if<Table>(&form_)) {
    for (double b : tab->breakpoints)
      if (b >= window_start_ && b <= window_end_) out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double TimeFunction::sup_abs() const {
  return std::visit(
      [](const auto& form) -> double {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return std::abs(form.value);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return std::abs(form.amplitude);
        } else {
          double m = 0.0;
          for (const cplx& v : form.values) m = std::max(m, std::abs(v));
          return m;
        }
      },
      form_);
}

bool TimeFunction::is_identically_zero() const { return sup_abs() == 0.0; }

bool TimeFunction::is_real() const {
  return std::visit(
      [](const auto& form) -> bool {
        using T = std::decay_t<decltype(form)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return form.value.imag() == 0.0;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return form.amplitude == cplx{0.0, 0.0} ||
                 (form.omega == 0.0 && (form.amplitude * std::polar(1.0, form.phase)).imag() == 0.0);
        } else {
          return std::all_of(form.values.begin(), form.values.end(),
                             [](const cplx& v) { return v.imag() == 0.0; });
        }
      },
      form_);
}

}  // namespace qcm
