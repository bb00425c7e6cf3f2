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

// Time-dependent generator of the reduced characteristic evolution, acting on
// trace-class operators (Schroedinger side):
//
//   G_t[rho] = K(f, r(-k)) rho + rho K(f, r(k))^dag
//              + sum_i <z_i|S(k) z_i> B_i(f) rho B_i(f)^dag + C(k, b, c, h) rho
//
// with B_i(l) = R_i + sum_j S_ij l_j and
// K(l, r) = K - sum_ij R_i^dag S_ij l_j - |l|^2/2 + sum_i conj(r_i) B_i(l).
// At k = 0 this is the Lindblad generator of the master equation with the
// coherent field f acting as a classical drive.

#include <memory>
#include <vector>

#include "qcm/fock.hpp"
#include "qcm/measurement.hpp"
#include "qcm/model.hpp"

namespace qcm {

/// Coherent-field amplitudes f_i(t), zero from `window_end` on.
class FieldProfile {
 public:
  FieldProfile() = default;
  explicit FieldProfile(std::vector<TimeFunction> components,
                        double window_end = std::numeric_limits<double>::infinity());

  static FieldProfile vacuum(std::size_t channels) { return FieldProfile(std::vector<TimeFunction>(channels)); }

  std::size_t channels() const { return f_.size(); }
  const TimeFunction& component(std::size_t i) const { return f_[i]; }
  double window_end() const { return window_end_; }
  Eigen::VectorXcd at(double t, double anchor) const;
  Eigen::VectorXcd at(double t) const { return at(t, t); }
  std::vector<double> discontinuities() const;
  FieldProfile shifted(double s) const;

 private:
  std::vector<TimeFunction> f_;
  double window_end_ = std::numeric_limits<double>::infinity();
};

/// The DPO laser: f_i(t) = delta_{i,laser} i lambda e^{-2 i omega_c t} / conj(beta2) on [0, T).
FieldProfile laser_field(const DpoParams& params, double window_end, std::size_t channels = 8,
                         std::size_t laser_channel = 3);

struct GeneratorContext {
  ModelSpec model;
  ObservableSpec spec;
  FieldProfile field;
  TestFunction k;

  /// Throws DimensionError on channel/observable count mismatches and
  /// ValidationError when S is not unitary (1e-10).
  void validate() const;

  /// The same data seen from time s: every function x -> g(x + s).
  GeneratorContext shifted(double s) const;

  /// Sorted jump times of k, f, h, b, c inside (0, t_end).
  std::vector<double> breakpoints(double t_end) const;
};

/// B_i(l) = R_i + (sum_j S_ij l_j) 1  (0-based channel i)
SystemOperator B_of_lambda(const ModelSpec& model, const Eigen::VectorXcd& lambda, std::size_t i);

/// K(l, r) = K - sum_ij R_i^dag S_ij l_j - (|l|^2/2) 1 + sum_i conj(r_i) B_i(l)
SystemOperator K_of_lambda_r(const ModelSpec& model, const Eigen::VectorXcd& lambda, const Eigen::VectorXcd& r);

/// Matrix-free evaluation of the generator. Construction precomputes a
/// common sparsity pattern for every operator that can appear in a node
/// operator, and groups channels whose R_i are proportional to a common
/// operator X so that each group costs one X rho X^dag product.
class Generator {
 public:
  struct Workspace;
  struct WorkspaceDeleter {
    void operator()(Workspace* ws) const;
  };
  using WorkspacePtr = std::unique_ptr<Workspace, WorkspaceDeleter>;

  explicit Generator(GeneratorContext ctx);
  ~Generator();
  Generator(Generator&&) noexcept;
  Generator& operator=(Generator&&) noexcept;

  const GeneratorContext& context() const { return ctx_; }
  std::size_t dim() const { return ctx_.model.space().dim(); }

  WorkspacePtr make_workspace() const;

  /// out = G_t[rho]; piecewise data resolved at `anchor`.
  void apply(double t, double anchor, const DenseMatrix& rho, DenseMatrix& out, Workspace& ws) const;
  DenseMatrix apply(double t, const DenseMatrix& rho) const;

  /// Upper bound on the operator norm of G_t (used for default step sizes).
  double norm_bound(double t, double anchor) const;

  /// Number of channel groups after proportionality detection.
  std::size_t channel_groups() const { return groups_.size(); }

 private:
  struct Group {
    std::size_t basis_index;            // X_g within the pattern basis
    std::vector<std::size_t> channels;  // members i with R_i = coeff_i X_g
    std::vector<cplx> coeff;
  };

  void assemble(double t, double anchor, Workspace& ws) const;

  GeneratorContext ctx_;
  // Union CSR pattern of {K, R_i, R_i^dag, 1}.
  std::vector<std::uint32_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  // basis_[b] lists (slot, value) pairs of basis operator b inside the pattern.
  std::vector<std::vector<std::pair<std::uint32_t, cplx>>> basis_;
  std::size_t idx_K_ = 0, idx_I_ = 0;
  std::vector<std::size_t> idx_R_, idx_Rdag_;  // per channel, npos when R_i = 0
  std::vector<Group> groups_;
  std::vector<SystemOperator> group_ops_;
  std::vector<double> group_norm_;
};

/// Convenience: one-shot evaluation with a fresh Generator.
DenseMatrix apply_generator(const GeneratorContext& ctx, double t, const DenseMatrix& rho);

}  // namespace qcm
