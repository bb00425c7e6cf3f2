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

// JSON run configuration. Complex numbers are [re, im] pairs; unknown keys
// are rejected. See configs/ for complete examples and README.md for the
// schema.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qcm/statistics.hpp"

namespace qcm {

struct AxisRequest {
  std::size_t interval = 0;
  std::size_t observable = 0;
  bool counting = true;
  std::size_t n_kappa = 256;
  std::optional<double> kappa_max;  // symmetric axes; empty = automatic
};

struct StatisticsSection {
  std::vector<double> breakpoints;
  std::vector<AxisRequest> axes;
  std::size_t n_max = 20;
  double x_start = -6.0, x_stop = 6.0;
  std::size_t x_points = 121;
};

struct ValidateSection {
  int guard = 2;
  std::size_t random_vectors = 16;
  double threshold = 1e-10;
};

struct OracleSection {
  int n_max = 2;
  int m_max = 1;
  double t = 1.0;
  std::size_t draws = 5;
};

struct RunConfig {
  std::string text;
  std::string sha256;

  std::string model_type;  // dpo | system_free | generic
  std::optional<DpoParams> dpo;
  ModelSpec model;
  int guard = 2;
  ObservableSpec spec;
  FieldProfile field;
  TestFunction k;
  EvolutionConfig evolution;
  std::optional<StatisticsSection> statistics;
  DensityOperator rho0;
  std::string output_dir = ".";
  ValidateSection validate;
  OracleSection oracle;

  GeneratorContext context() const { return {model, spec, field, k}; }
};

/// Throws ConfigError with the offending key path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Lower-case hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace qcm
