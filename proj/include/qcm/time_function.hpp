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

// Locally bounded complex functions of time used for h, b, c, and the field
// profile f. Three closed forms are supported, each optionally restricted to
// a window [start, end):
//
//   constant      z
//   exponential   A * exp(i (phase + omega t))
//   table         piecewise constant, value v_l on (t_{l-1}, t_l), zero outside
//
// Discontinuities (window edges, table breakpoints) are resolved with an
// `anchor` time: the piece containing the anchor is used, while smooth parts
// are evaluated at `t`. Integrators pass an anchor strictly inside the current
// step segment so that a step ending on a jump sees a single continuous piece.

#include <complex>
#include <limits>
#include <variant>
#include <vector>

namespace qcm {

using cplx = std::complex<double>;

class TimeFunction {
 public:
  struct Constant {
    cplx value{0.0, 0.0};
  };
  struct Exponential {
    cplx amplitude{0.0, 0.0};
    double phase = 0.0;
    double omega = 0.0;
  };
  struct Table {
    std::vector<double> breakpoints;  // strictly increasing, size = values.size() + 1
    std::vector<cplx> values;
  };

  TimeFunction() = default;  // identically zero

  static TimeFunction zero() { return {}; }
  static TimeFunction constant(cplx value);
  static TimeFunction exponential(cplx amplitude, double phase, double omega);
  static TimeFunction table(std::vector<double> breakpoints, std::vector<cplx> values);

  /// Restrict to [start, end); values outside are zero.
  TimeFunction windowed(double start, double end) const;

  cplx operator()(double t) const { return eval(t, t); }
  cplx eval(double t, double anchor) const;

  /// f_s(x) = f(x + s)
  TimeFunction shifted(double s) const;

  /// Jump locations of the function (window edges and table breakpoints).
  std::vector<double> discontinuities() const;

  /// sup |f| over its support.
  double sup_abs() const;
  bool is_identically_zero() const;
  /// True when the function takes only real values.
  bool is_real() const;

  double window_start() const { return window_start_; }
  double window_end() const { return window_end_; }
  const std::variant<Constant, Exponential, Table>& form() const { return form_; }

 private:
  std::variant<Constant, Exponential, Table> form_{Constant{}};
  double window_start_ = -std::numeric_limits<double>::infinity();
  double window_end_ = std::numeric_limits<double>::infinity();
};

}  // namespace qcm
