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

#include "qcm/commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "qcm/errors.hpp"
#include "qcm/oracle.hpp"

namespace qcm {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

fs::path output_dir(const RunConfig& cfg, const CommandOptions& opts) {
  fs::path dir = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << content;
}

std::string csv_header(const RunConfig& cfg, double leakage_max) {
  const TruncatedSpace& s = cfg.model.space();
  std::ostringstream os;
  os << "# qcm " << QCM_VERSION << "\n";
  os << "# config_sha256 " << cfg.sha256 << "\n";
  os << "# truncation n_max=" << s.n_max() << " m_max=" << s.m_max() << " guard=" << cfg.guard << "\n";
  os << "# leakage_max " << format_double(leakage_max) << "\n";
  return os.str();
}

json json_header(const RunConfig& cfg, double leakage_max) {
  const TruncatedSpace& s = cfg.model.space();
  return json{{"tool", "qcm"},
              {"version", QCM_VERSION},
              {"config_sha256", cfg.sha256},
              {"truncation", {{"n_max", s.n_max()}, {"m_max", s.m_max()}, {"guard", cfg.guard}}},
              {"leakage_max", leakage_max}};
}

const StatisticsSection& statistics_of(const RunConfig& cfg) {
  if (!cfg.statistics) throw ConfigError("this command needs a statistics section");
  return *cfg.statistics;
}

// Builds the kappa grid; automatic kappa_max is estimated from the marginal of that axis.
IncrementGrid build_grid(const RunConfig& cfg) {
  const StatisticsSection& st = statistics_of(cfg);
  IncrementGrid grid;
  grid.breakpoints = st.breakpoints;
  for (const AxisRequest& ar : st.axes) {
    std::vector<double> kappa;
    if (ar.counting) {
      kappa = IncrementGrid::counting_nodes(ar.n_kappa);
    } else {
      double kmax = 0.0;
      if (ar.kappa_max) {
        kmax = *ar.kappa_max;
      } else {
        const auto slice = charfunc_slice(cfg.context(), st.breakpoints[ar.interval], st.breakpoints[ar.interval + 1],
                                          ar.observable, cfg.rho0, cfg.evolution);
        kmax = default_kappa_max(slice);
      }
      kappa = IncrementGrid::symmetric_nodes(kmax, ar.n_kappa);
    }
    grid.axes.push_back({ar.interval, ar.observable, std::move(kappa)});
  }
  return grid;
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json warnings_json(const std::vector<std::string>& w) { return json(w); }

// --- random draws for the oracle comparison -------------------------------------------

TimeFunction random_exp(std::mt19937_64& rng, double amp_lo, double amp_hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double amp = amp_lo + (amp_hi - amp_lo) * u(rng);
  return TimeFunction::exponential(amp, 2.0 * std::numbers::pi * u(rng), -2.0 + 4.0 * u(rng));
}

TestFunction random_test_function(std::mt19937_64& rng, std::size_t m, double t, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double t1 = t * (0.2 + 0.6 * u(rng));
  std::vector<std::vector<double>> val(2, std::vector<double>(m));
  for (auto& v : val)
    for (double& x : v) x = scale * (2.0 * u(rng) - 1.0);
  return TestFunction({0.0, t1, t}, std::move(val));
}

EvolutionConfig tight_config(double t_end) {
  EvolutionConfig c;
  c.t_end = t_end;
  c.method = StepMethod::Adaptive;
  c.rtol = 1e-11;
  c.atol = 1e-14;
  c.store_stride = std::numeric_limits<std::size_t>::max();
  return c;
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ValidationError*>(&e)) return 3;
  if (dynamic_cast<const IntegrationError*>(&e)) return 4;
  if (dynamic_cast<const InversionError*>(&e)) return 5;
  if (dynamic_cast<const DimensionError*>(&e)) return 2;
  return 1;
}

// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  json checks = json::array();
  bool pass = true;
  auto add = [&](const std::string& name, double value, double threshold) {
    const bool ok = value < threshold;
    pass = pass && ok;
    checks.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", ok}});
  };
  const DissipativityReport rep =
      check_dissipativity(cfg.model, cfg.validate.guard, cfg.validate.random_vectors, opts.seed);
  add("dissipativity_max_residual", rep.max_residual, cfg.validate.threshold);
  add("scattering_unitarity_deviation", check_S_unitary(cfg.model), 1e-10);
  // The observable constraints were enforced while loading; reaching here means they hold.
  checks.push_back({{"name", "observable_constraints"}, {"pass", true}});

  json report{{"header", json_header(cfg, 0.0)},
              {"checks", checks},
              {"diagnostics",
               {{"interior_dim", rep.interior_dim}, {"samples", rep.samples}, {"model", cfg.model.label()}}},
              {"pass", pass}};
  write_json(output_dir(cfg, opts) / "validate.json", report);
  out << "validate: " << (pass ? "pass" : "FAIL") << " (dissipativity residual " << format_double(rep.max_residual)
      << ")\n";
  return pass ? 0 : 3;
}

int cmd_evolve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const GeneratorContext ctx{cfg.model, cfg.spec, cfg.field, TestFunction::zero(cfg.spec.observables())};
  const TruncatedSpace& s = cfg.model.space();
  const SystemOperator na = number_a(s), nb = number_b(s), a = ladder_a(s), b = ladder_b(s);
  std::ostringstream rows;
  double leak_max = 0.0;
  EvolutionConfig ec = cfg.evolution;
  ec.observer = [&](double t, const DenseMatrix& rho) {
    const cplx tr = rho.trace(), ea = trace_product(a, rho), eb = trace_product(b, rho);
    const double leak = leakage(s, rho, cfg.guard);
    leak_max = std::max(leak_max, leak);
    rows << format_double(t) << ',' << format_double(tr.real()) << ',' << format_double(tr.imag()) << ','
         << format_double(trace_product(na, rho).real()) << ',' << format_double(trace_product(nb, rho).real())
         << ',' << format_double(ea.real()) << ',' << format_double(ea.imag()) << ',' << format_double(eb.real())
         << ',' << format_double(eb.imag()) << ',' << format_double(leak) << '\n';
  };
  const EvolutionResult res = evolve(ctx, cfg.rho0, ec);
  std::string text = csv_header(cfg, leak_max);
  text += "t,trace_re,trace_im,n_a,n_b,a_re,a_im,b_re,b_im,leakage\n";
  text += rows.str();
  write_file(output_dir(cfg, opts) / "evolve.csv", text);
  out << "evolve: " << res.times.size() << " rows, " << res.stats.accepted << " steps, leakage max "
      << format_double(leak_max) << "\n";
  return 0;
}

int cmd_charfunc(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const IncrementGrid grid = build_grid(cfg);
  const CharfuncGrid cf = joint_charfunc(cfg.context(), grid, cfg.rho0, cfg.evolution, opts.threads);
  std::string text = csv_header(cfg, cf.max_leakage);
  for (std::size_t a = 0; a < grid.axes.size(); ++a) text += "kappa_" + std::to_string(a) + ",";
  text += "phi_re,phi_im\n";
  for (std::size_t p = 0; p < cf.values.size(); ++p) {
    const std::vector<std::size_t> idx = grid.unflatten(p);
    for (std::size_t a = 0; a < idx.size(); ++a) text += format_double(grid.axes[a].kappa[idx[a]]) + ",";
    text += format_double(cf.values[p].real()) + "," + format_double(cf.values[p].imag()) + "\n";
  }
  write_file(output_dir(cfg, opts) / "charfunc.csv", text);
  out << "charfunc: " << cf.values.size() << " grid points\n";
  return 0;
}

int cmd_counts(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const StatisticsSection& st = statistics_of(cfg);
  for (const AxisRequest& ar : st.axes) {
    if (!ar.counting) throw ConfigError("counts: every statistics axis must be of kind counting");
    if (cfg.spec.kind(ar.observable) != ObservableKind::Counting) {
      out << "counts: note: observable " << ar.observable << " is not a pure counting observable; "
          << "its inversion assumes integer-valued increments\n";
    }
  }
  const IncrementGrid grid = build_grid(cfg);
  const CharfuncGrid cf = joint_charfunc(cfg.context(), grid, cfg.rho0, cfg.evolution, opts.threads);
  const JointCountDistribution dist = invert_counting_joint(cf, st.n_max);

  json counts = json::array();
  for (std::size_t p = 0; p < dist.probabilities.size(); ++p) {
    std::vector<std::size_t> idx(dist.shape.size());
    std::size_t q = p;
    for (std::size_t a = dist.shape.size(); a-- > 0;) {
      idx[a] = q % dist.shape[a];
      q /= dist.shape[a];
    }
    counts.push_back(idx.size() == 1 ? json(idx[0]) : json(idx));
  }
  json report{{"header", json_header(cfg, cf.max_leakage)},
              {"counts", counts},
              {"probabilities", dist.probabilities},
              {"diagnostics",
               {{"imaginary_residue", dist.imaginary_residue},
                {"total_mass", dist.total_mass},
                {"most_negative", dist.most_negative},
                {"warnings", warnings_json(dist.warnings)}}}};
  write_json(output_dir(cfg, opts) / "counts.json", report);
  out << "counts: total mass " << format_double(dist.total_mass) << "\n";
  return 0;
}

int cmd_homodyne(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const StatisticsSection& st = statistics_of(cfg);
  if (st.axes.size() != 1 || st.axes[0].counting) throw ConfigError("homodyne: exactly one homodyne axis is required");
  const IncrementGrid grid = build_grid(cfg);
  const CharfuncGrid cf = joint_charfunc(cfg.context(), grid, cfg.rho0, cfg.evolution, opts.threads);
  std::vector<double> x(st.x_points);
  for (std::size_t i = 0; i < st.x_points; ++i) {
    x[i] = st.x_start + (st.x_stop - st.x_start) * static_cast<double>(i) / static_cast<double>(st.x_points - 1);
  }
  const double kmax = grid.axes[0].kappa.back();
  const QuadratureDensity q = invert_homodyne(cf.values, kmax, x);
  json report{{"header", json_header(cfg, cf.max_leakage)},
              {"x", q.x},
              {"density", q.density},
              {"diagnostics",
               {{"kappa_max", kmax},
                {"imaginary_residue", q.imaginary_residue},
                {"total_mass", q.total_mass}}}};
  write_json(output_dir(cfg, opts) / "homodyne.json", report);
  out << "homodyne: total mass " << format_double(q.total_mass) << "\n";
  return 0;
}

int cmd_oracle_compare(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const OracleSection& oc = cfg.oracle;
  const double t = oc.t;
  json checks = json::array();
  bool pass = true;
  auto add = [&](const std::string& name, double worst, double threshold) {
    const bool ok = worst < threshold;
    pass = pass && ok;
    checks.push_back({{"name", name}, {"max_deviation", worst}, {"threshold", threshold}, {"pass", ok}});
  };

  // 1. closed form of the trivial system vs evolve
  {
    double worst = 0.0;
    for (std::size_t j = 0; j < oc.draws; ++j) {
      std::mt19937_64 rng(opts.seed * 1000003 + j);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<std::vector<TimeFunction>> h(2, std::vector<TimeFunction>(2));
      h[1][1] = random_exp(rng, 0.5, 1.5);
      const std::vector<TimeFunction> b{TimeFunction::constant({0.5 * u(rng) - 0.25, 0.5 * u(rng) - 0.25}),
                                        TimeFunction::constant({0.5 * u(rng) - 0.25, 0.0})};
      const std::vector<TimeFunction> c{TimeFunction::constant(u(rng) - 0.5), TimeFunction::constant(u(rng) - 0.5)};
      const ObservableSpec spec({{1.0, 0.0}, {0.0, 0.0}}, h, b, c);
      const FieldProfile f({random_exp(rng, 0.2, 1.2), random_exp(rng, 0.2, 1.2)}, t * (0.6 + 0.6 * u(rng)));
      const TestFunction k = random_test_function(rng, 2, t, 2.0);
      const GeneratorContext ctx{system_free_model(2), spec, f, k};
      const cplx engine = evolve(ctx, DenseMatrix::identity(1), tight_config(t)).phi.back();
      worst = std::max(worst, std::abs(engine - system_free_charfunc(spec, f, k, t)));
    }
    add("system_free_closed_form", worst, 1e-7);
  }

  const TruncatedSpace space(oc.n_max, oc.m_max);
  // 2. dense exponential vs evolve, frozen coefficients
  {
    double worst = 0.0;
    for (std::size_t j = 0; j < oc.draws; ++j) {
      std::mt19937_64 rng(opts.seed * 2000003 + j);
      const DpoParams p = random_dpo_params(rng());
      const GeneratorContext ctx{dpo_model(p, space), dpo_observables(p.theta3, p.omega_c),
                                 laser_field(p, 0.7 * t), random_test_function(rng, 3, t, 1.0)};
      const DenseMatrix rho0 = DenseMatrix::projector(basis_vector(space, 0, 0));
      EvolutionConfig ec = tight_config(t);
      ec.freeze = true;
      const DenseMatrix a = evolve(ctx, rho0, ec).final_state;
      worst = std::max(worst, max_abs_diff(a, dense_expm_propagate(ctx, rho0, t)));
    }
    add("dense_expm_frozen", worst, 1e-8);
  }

  // 3. Heisenberg / Schroedinger duality
  {
    double worst = 0.0;
    for (std::size_t j = 0; j < oc.draws; ++j) {
      std::mt19937_64 rng(opts.seed * 3000017 + j);
      std::normal_distribution<double> gauss;
      const DpoParams p = random_dpo_params(rng());
      const GeneratorContext ctx{dpo_model(p, space), dpo_observables(p.theta3, p.omega_c),
                                 laser_field(p, 0.7 * t), random_test_function(rng, 3, t, 1.0)};
      const std::size_t n = space.dim();
      std::vector<Triplet> xt;
      DenseMatrix tau(n);
      double l1 = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
          xt.push_back({r, c, {gauss(rng), gauss(rng)}});
          tau(r, c) = {gauss(rng), gauss(rng)};
          l1 += std::abs(tau(r, c));
        }
      tau *= 1.0 / l1;
      worst = std::max(worst, duality_check(ctx, t, SystemOperator(space, xt), tau, tight_config(t)));
    }
    add("heisenberg_duality", worst, 1e-7);
  }

  json report{{"header", json_header(cfg, 0.0)},
              {"checks", checks},
              {"diagnostics", {{"n_max", oc.n_max}, {"m_max", oc.m_max}, {"t", t}, {"draws", oc.draws}}},
              {"pass", pass}};
  write_json(output_dir(cfg, opts) / "oracle.json", report);
  out << "oracle-compare: " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 3;
}

int run_command(const std::string& command, const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = load_config(opts.config_path);
    if (command == "validate") return cmd_validate(cfg, opts, out);
    if (command == "evolve") return cmd_evolve(cfg, opts, out);
    if (command == "charfunc") return cmd_charfunc(cfg, opts, out);
    if (command == "counts") return cmd_counts(cfg, opts, out);
    if (command == "homodyne") return cmd_homodyne(cfg, opts, out);
    if (command == "oracle-compare") return cmd_oracle_compare(cfg, opts, out);
    err << "qcm: unknown command " << command << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "qcm " << command << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace qcm
