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

#include "qcm/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::vector<double> kappa_negated(std::vector<double> k) {
  for (double& x : k) x = -x;
  return k;
}

// R_i == c * X entrywise (same pattern, constant ratio); returns c.
std::optional<cplx> proportional(const SystemOperator& r, const SystemOperator& x) {
  if (r.nnz() != x.nnz() || r.nnz() == 0) return std::nullopt;
  const std::vector<Triplet> tr = r.triplets();
  const std::vector<Triplet> tx = x.triplets();
  const cplx c = tr[0].value / tx[0].value;
  for (std::size_t e = 0; e < tr.size(); ++e) {
    if (tr[e].row != tx[e].row || tr[e].col != tx[e].col) return std::nullopt;
    if (std::abs(tr[e].value - c * tx[e].value) > 1e-14 * std::abs(tr[e].value)) return std::nullopt;
  }
  return c;
}

double csr_norm_bound(std::size_t n, const std::uint32_t* row_ptr, const std::uint32_t* col, const cplx* val) {
  double ninf = 0.0;
  std::vector<double> colsum(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::uint32_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) {
      s += std::abs(val[e]);
      colsum[col[e]] += std::abs(val[e]);
    }
    ninf = std::max(ninf, s);
  }
  const double none = colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
  return std::sqrt(ninf * none);
}

}  // namespace

// ---------------------------------------------------------------------------
// FieldProfile

FieldProfile::FieldProfile(std::vector<TimeFunction> components, double window_end)
    : f_(std::move(components)), window_end_(window_end) {
  if (!(window_end > 0.0)) throw ValidationError("field window end must be positive");
}

Eigen::VectorXcd FieldProfile::at(double t, double anchor) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(f_.size()));
  if (anchor >= window_end_) return v;
  for (std::size_t i = 0; i < f_.size(); ++i) v[static_cast<Eigen::Index>(i)] = f_[i].eval(t, anchor);
  return v;
}

std::vector<double> FieldProfile::discontinuities() const {
  std::vector<double> out;
  if (std::isfinite(window_end_)) out.push_back(window_end_);
  for (const TimeFunction& f : f_)
    for (double x : f.discontinuities()) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FieldProfile FieldProfile::shifted(double s) const {
  FieldProfile out;
  out.f_.reserve(f_.size());
  for (const TimeFunction& f : f_) out.f_.push_back(f.shifted(s));
  out.window_end_ = window_end_ - s;
  return out;
}

FieldProfile laser_field(const DpoParams& p, double window_end, std::size_t channels, std::size_t laser_channel) {
  if (laser_channel >= channels) throw DomainError("laser channel out of range");
  std::vector<TimeFunction> f(channels);
  if (p.lambda_drive != cplx{0.0, 0.0}) {
    if (p.beta[1] == cplx{0.0, 0.0}) throw ValidationError("laser drive requires beta2 != 0");
    const cplx amp = cplx{0.0, 1.0} * p.lambda_drive / std::conj(p.beta[1]);
    f[laser_channel] = TimeFunction::exponential(amp, 0.0, -2.0 * p.omega_c).windowed(0.0, window_end);
  }
  return FieldProfile(std::move(f), window_end);
}

// ---------------------------------------------------------------------------
// GeneratorContext

void GeneratorContext::validate() const {
  const std::size_t d = model.channels();
  if (spec.channels() != d || field.channels() != d) {
    throw DimensionError("channel counts disagree: model " + std::to_string(d) + ", observables " +
                         std::to_string(spec.channels()) + ", field " + std::to_string(field.channels()));
  }
  if (k.observables() != spec.observables()) {
    throw DimensionError("test function has " + std::to_string(k.observables()) + " components, observables " +
                         std::to_string(spec.observables()));
  }
  const double dev = check_S_unitary(model);
  if (dev > 1e-10) throw ValidationError("scattering matrix is not unitary (deviation " + std::to_string(dev) + ")");
}

GeneratorContext GeneratorContext::shifted(double s) const {
  return {model, spec.shifted(s), field.shifted(s), k.shifted(s)};
}

std::vector<double> GeneratorContext::breakpoints(double t_end) const {
  std::vector<double> all = k.breakpoints();
  for (double x : field.discontinuities()) all.push_back(x);
  for (double x : spec.discontinuities()) all.push_back(x);
  std::vector<double> out;
  for (double x : all)
    if (x > 0.0 && x < t_end) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// B(l), K(l, r)

SystemOperator B_of_lambda(const ModelSpec& model, const Eigen::VectorXcd& lambda, std::size_t i) {
  if (i >= model.channels()) throw DomainError("channel index " + std::to_string(i) + " out of range");
  if (lambda.size() != static_cast<Eigen::Index>(model.channels())) throw DimensionError("lambda has wrong length");
  const cplx mu = (model.S().row(static_cast<Eigen::Index>(i)) * lambda)(0);
  return model.R(i) + mu * SystemOperator::identity(model.space());
}

SystemOperator K_of_lambda_r(const ModelSpec& model, const Eigen::VectorXcd& lambda, const Eigen::VectorXcd& r) {
  const std::size_t d = model.channels();
  if (lambda.size() != static_cast<Eigen::Index>(d) || r.size() != static_cast<Eigen::Index>(d)) {
    throw DimensionError("lambda and r must have d components");
  }
  const Eigen::VectorXcd mu = model.S() * lambda;
  std::vector<SystemOperator> ops{model.K(), SystemOperator::identity(model.space())};
  std::vector<cplx> coeffs{1.0, -0.5 * lambda.squaredNorm()};
  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    ops.push_back(model.R(i).adjoint());
    coeffs.push_back(-mu[ii]);
    ops.push_back(B_of_lambda(model, lambda, i));
    coeffs.push_back(std::conj(r[ii]));
  }
  return linear_combination(ops, coeffs);
}

// ---------------------------------------------------------------------------
// Generator

struct Generator::Workspace {
  DenseMatrix rho_dag, tmp, tmp2;
  std::vector<cplx> left_vals, right_vals;
  std::vector<cplx> coef_left, coef_right;
  std::vector<cplx> group_weight;
  double cached_t = std::numeric_limits<double>::quiet_NaN();
  double cached_anchor = std::numeric_limits<double>::quiet_NaN();
};

Generator::Generator(GeneratorContext ctx) : ctx_(std::move(ctx)) {
  ctx_.validate();
  const ModelSpec& model = ctx_.model;
  const TruncatedSpace& space = model.space();
  const std::size_t n = space.dim();
  const std::size_t d = model.channels();

  std::vector<SystemOperator> basis_ops{model.K(), SystemOperator::identity(space)};
  idx_K_ = 0;
  idx_I_ = 1;
  idx_R_.assign(d, npos);
  idx_Rdag_.assign(d, npos);
  for (std::size_t i = 0; i < d; ++i) {
    if (model.R(i).nnz() == 0) continue;
    idx_R_[i] = basis_ops.size();
    basis_ops.push_back(model.R(i));
    idx_Rdag_[i] = basis_ops.size();
    basis_ops.push_back(model.R(i).adjoint());
  }

  for (std::size_t i = 0; i < d; ++i) {
    if (idx_R_[i] == npos) continue;
    bool placed = false;
    for (Group& g : groups_) {
      if (auto c = proportional(model.R(i), basis_ops[g.basis_index])) {
        g.channels.push_back(i);
        g.coeff.push_back(*c);
        placed = true;
        break;
      }
    }
    if (!placed) groups_.push_back(Group{idx_R_[i], {i}, {1.0}});
  }
  for (const Group& g : groups_) {
    group_ops_.push_back(basis_ops[g.basis_index]);
    const SystemOperator& x = group_ops_.back();
    group_norm_.push_back(std::sqrt(x.norm_one() * x.norm_inf()));
  }

  // Union pattern.
  std::vector<std::vector<std::uint32_t>> cols(n);
  for (const SystemOperator& op : basis_ops)
    for (const Triplet& t : op.triplets()) cols[t.row].push_back(static_cast<std::uint32_t>(t.col));
  row_ptr_.assign(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    std::sort(cols[r].begin(), cols[r].end());
    cols[r].erase(std::unique(cols[r].begin(), cols[r].end()), cols[r].end());
    row_ptr_[r + 1] = row_ptr_[r] + static_cast<std::uint32_t>(cols[r].size());
    col_.insert(col_.end(), cols[r].begin(), cols[r].end());
  }
  for (const SystemOperator& op : basis_ops) {
    std::vector<std::pair<std::uint32_t, cplx>> entries;
    for (const Triplet& t : op.triplets()) {
      const auto first = col_.begin() + row_ptr_[t.row];
      const auto last = col_.begin() + row_ptr_[t.row + 1];
      const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(t.col));
      entries.emplace_back(static_cast<std::uint32_t>(it - col_.begin()), t.value);
    }
    basis_.push_back(std::move(entries));
  }
}

Generator::~Generator() = default;
Generator::Generator(Generator&&) noexcept = default;
Generator& Generator::operator=(Generator&&) noexcept = default;

void Generator::WorkspaceDeleter::operator()(Workspace* ws) const { delete ws; }

Generator::WorkspacePtr Generator::make_workspace() const {
  WorkspacePtr ws(new Workspace);
  const std::size_t n = dim();
  ws->rho_dag = DenseMatrix(n);
  ws->tmp = DenseMatrix(n);
  ws->tmp2 = DenseMatrix(n);
  ws->left_vals.resize(col_.size());
  ws->right_vals.resize(col_.size());
  ws->coef_left.resize(basis_.size());
  ws->coef_right.resize(basis_.size());
  ws->group_weight.resize(groups_.size());
  return ws;
}

void Generator::assemble(double t, double anchor, Workspace& ws) const {
  if (ws.cached_t == t && ws.cached_anchor == anchor) return;
  const ModelSpec& model = ctx_.model;
  const std::size_t d = model.channels();
  const std::vector<double> kappa = ctx_.k.at(anchor);
  const Eigen::VectorXcd s = S_of_kappa(ctx_.spec, kappa);
  const Eigen::VectorXcd r_plus = r_of_k(ctx_.spec, kappa, t, anchor);
  const Eigen::VectorXcd r_minus = r_of_k(ctx_.spec, kappa_negated(kappa), t, anchor);
  const cplx C = C_scalar(ctx_.spec, kappa, t, anchor);
  const Eigen::VectorXcd lambda = ctx_.field.at(t, anchor);
  const Eigen::VectorXcd mu = model.S() * lambda;

  std::fill(ws.coef_left.begin(), ws.coef_left.end(), cplx{0.0, 0.0});
  std::fill(ws.coef_right.begin(), ws.coef_right.end(), cplx{0.0, 0.0});
  ws.coef_left[idx_K_] = 1.0;
  ws.coef_right[idx_K_] = 1.0;
  cplx id_left = -0.5 * lambda.squaredNorm() + C;
  cplx id_right = -0.5 * lambda.squaredNorm();
  for (std::size_t i = 0; i < d; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    id_left += std::conj(r_minus[ii]) * mu[ii] + s[ii] * std::norm(mu[ii]);
    id_right += std::conj(r_plus[ii]) * mu[ii];
    if (idx_R_[i] == npos) continue;
    ws.coef_left[idx_R_[i]] += std::conj(r_minus[ii]);
    ws.coef_left[idx_Rdag_[i]] += -mu[ii];
    ws.coef_right[idx_R_[i]] += std::conj(r_plus[ii]);
    ws.coef_right[idx_Rdag_[i]] += -mu[ii];
  }
  ws.coef_left[idx_I_] += id_left;
  ws.coef_right[idx_I_] += id_right;

  // Channel terms s_i (c_i X + mu_i)(rho)(c_i X + mu_i)^dag, cross terms folded into the
  // left/right node operators.
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const Group& grp = groups_[g];
    cplx w = 0.0, gamma_left = 0.0, gamma_right = 0.0;
    for (std::size_t k = 0; k < grp.channels.size(); ++k) {
      const auto ii = static_cast<Eigen::Index>(grp.channels[k]);
      const cplx c = grp.coeff[k];
      w += s[ii] * std::norm(c);
      gamma_left += s[ii] * c * std::conj(mu[ii]);
      gamma_right += s[ii] * mu[ii] * std::conj(c);
    }
    ws.group_weight[g] = w;
    ws.coef_left[grp.basis_index] += gamma_left;
    ws.coef_right[grp.basis_index] += std::conj(gamma_right);
  }

  std::fill(ws.left_vals.begin(), ws.left_vals.end(), cplx{0.0, 0.0});
  std::fill(ws.right_vals.begin(), ws.right_vals.end(), cplx{0.0, 0.0});
  for (std::size_t b = 0; b < basis_.size(); ++b) {
    const cplx cl = ws.coef_left[b], cr = ws.coef_right[b];
    if (cl == cplx{0.0, 0.0} && cr == cplx{0.0, 0.0}) continue;
    for (const auto& [slot, v] : basis_[b]) {
      ws.left_vals[slot] += cl * v;
      ws.right_vals[slot] += cr * v;
    }
  }
  ws.cached_t = t;
  ws.cached_anchor = anchor;
}

void Generator::apply(double t, double anchor, const DenseMatrix& rho, DenseMatrix& out, Workspace& ws) const {
  const std::size_t n = dim();
  if (rho.dim() != n || out.dim() != n) throw DimensionError("generator applied to an operator of the wrong dimension");
  assemble(t, anchor, ws);
  const kernels::KernelTable& kt = kernels::active();
  const kernels::CsrView left{n, row_ptr_.data(), col_.data(), ws.left_vals.data()};
  const kernels::CsrView right{n, row_ptr_.data(), col_.data(), ws.right_vals.data()};

  ws.rho_dag.set_zero();
  kt.adjoint_acc(n, rho.data(), 1.0, ws.rho_dag.data());

  out.set_zero();
  kt.spmm_acc(left, rho.data(), n, 1.0, out.data());

  // rho R^dag = (R rho^dag)^dag
  ws.tmp.set_zero();
  kt.spmm_acc(right, ws.rho_dag.data(), n, 1.0, ws.tmp.data());
  kt.adjoint_acc(n, ws.tmp.data(), 1.0, out.data());

  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const cplx w = ws.group_weight[g];
    if (w == cplx{0.0, 0.0}) continue;
    const kernels::CsrView x = group_ops_[g].view();
    ws.tmp.set_zero();
    kt.spmm_acc(x, ws.rho_dag.data(), n, 1.0, ws.tmp.data());  // X rho^dag
    ws.tmp2.set_zero();
    kt.adjoint_acc(n, ws.tmp.data(), 1.0, ws.tmp2.data());      // rho X^dag
    kt.spmm_acc(x, ws.tmp2.data(), n, w, out.data());            // w X rho X^dag
  }
}

DenseMatrix Generator::apply(double t, const DenseMatrix& rho) const {
  auto ws = make_workspace();
  DenseMatrix out(dim());
  apply(t, t, rho, out, *ws);
  return out;
}

double Generator::norm_bound(double t, double anchor) const {
  auto ws = make_workspace();
  assemble(t, anchor, *ws);
  const std::size_t n = dim();
  double bound = csr_norm_bound(n, row_ptr_.data(), col_.data(), ws->left_vals.data()) +
                 csr_norm_bound(n, row_ptr_.data(), col_.data(), ws->right_vals.data());
  for (std::size_t g = 0; g < groups_.size(); ++g) bound += std::abs(ws->group_weight[g]) * group_norm_[g] * group_norm_[g];
  return bound;
}

DenseMatrix apply_generator(const GeneratorContext& ctx, double t, const DenseMatrix& rho) {
  return Generator(ctx).apply(t, rho);
}

}  // namespace qcm
