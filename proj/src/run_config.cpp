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

#include "qcm/run_config.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "qcm/errors.hpp"

namespace qcm {

namespace {

using json = nlohmann::json;

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key \"" + key + "\"");
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), where + "." + key) : fallback;
}

std::size_t count(const json& v, const std::string& where) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

cplx complex_value(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + ": expected a complex number [re, im]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

TimeFunction time_function(const json& v, const std::string& where) {
  if (v.is_null()) return {};
  allow_keys(v, where, {"constant", "exp", "table", "window"});
  const int forms = int(v.contains("constant")) + int(v.contains("exp")) + int(v.contains("table"));
  if (forms != 1) throw ConfigError(where + ": exactly one of constant, exp, table is required");
  TimeFunction f;
  if (v.contains("constant")) {
    f = TimeFunction::constant(complex_value(v.at("constant"), where + ".constant"));
  } else if (v.contains("exp")) {
    const json& e = v.at("exp");
    const std::string w = where + ".exp";
    allow_keys(e, w, {"amplitude", "phase", "omega"});
    f = TimeFunction::exponential(complex_value(require(e, w, "amplitude"), w + ".amplitude"),
                                  number_or(e, w, "phase", 0.0), number_or(e, w, "omega", 0.0));
  } else {
    const json& t = v.at("table");
    const std::string w = where + ".table";
    allow_keys(t, w, {"breakpoints", "values"});
    std::vector<cplx> values;
    const json& vals = require(t, w, "values");
    if (!vals.is_array()) throw ConfigError(w + ".values: expected an array");
    for (std::size_t i = 0; i < vals.size(); ++i) values.push_back(complex_value(vals[i], w + ".values"));
    try {
      f = TimeFunction::table(number_list(require(t, w, "breakpoints"), w + ".breakpoints"), std::move(values));
    } catch (const Error& e) {
      throw ConfigError(w + ": " + e.what());
    }
  }
  if (v.contains("window")) {
    const std::vector<double> win = number_list(v.at("window"), where + ".window");
    if (win.size() != 2 || !(win[1] > win[0])) throw ConfigError(where + ".window: expected [start, end] with end > start");
    f = f.windowed(win[0], win[1]);
  }
  return f;
}

std::vector<Triplet> triplets(const json& v, const std::string& where, std::size_t dim) {
  if (!v.is_array()) throw ConfigError(where + ": expected a list of [row, col, value]");
  std::vector<Triplet> out;
  for (std::size_t e = 0; e < v.size(); ++e) {
    const std::string w = where + "[" + std::to_string(e) + "]";
    const json& t = v[e];
    if (!t.is_array() || t.size() != 3) throw ConfigError(w + ": expected [row, col, value]");
    const std::size_t r = count(t[0], w), c = count(t[1], w);
    if (r >= dim || c >= dim) throw ConfigError(w + ": index outside the truncated space");
    out.push_back({r, c, complex_value(t[2], w)});
  }
  return out;
}

DpoParams dpo_params(const json& m) {
  const std::string w = "model";
  allow_keys(m, w, {"type", "omega_c", "g", "kappa", "nbar", "kappa_p", "nbar_p", "alpha", "beta", "alpha_split",
                    "beta_split", "theta3", "lambda"});
  const double omega_c = number(require(m, w, "omega_c"), w + ".omega_c");
  const double g = number(require(m, w, "g"), w + ".g");
  const double kappa = number(require(m, w, "kappa"), w + ".kappa");
  const double nbar = number_or(m, w, "nbar", 0.0);
  const double kappa_p = number(require(m, w, "kappa_p"), w + ".kappa_p");
  const double nbar_p = number_or(m, w, "nbar_p", 0.0);
  const double theta3 = number_or(m, w, "theta3", 0.0);
  const cplx lambda = m.contains("lambda") ? complex_value(m.at("lambda"), w + ".lambda") : cplx{0.0, 0.0};

  const bool explicit_amps = m.contains("alpha") || m.contains("beta");
  const bool splits = m.contains("alpha_split") || m.contains("beta_split");
  if (explicit_amps == splits) throw ConfigError(w + ": give either alpha/beta or alpha_split/beta_split");
  if (splits) {
    auto split = [&](const char* key) {
      const json& v = require(m, w, key);
      if (!v.is_array() || v.size() != 3) throw ConfigError(w + "." + key + ": expected 3 complex fractions");
      std::array<cplx, 3> c{};
      for (std::size_t i = 0; i < 3; ++i) c[i] = complex_value(v[i], w + "." + key);
      return c;
    };
    return DpoParams::from_splits(omega_c, g, kappa, nbar, kappa_p, nbar_p, split("alpha_split"),
                                  split("beta_split"), theta3, lambda);
  }
  DpoParams p;
  p.omega_c = omega_c;
  p.g = g;
  p.kappa = kappa;
  p.nbar = nbar;
  p.kappa_p = kappa_p;
  p.nbar_p = nbar_p;
  p.theta3 = theta3;
  p.lambda_drive = lambda;
  auto amps = [&](const char* key, std::array<cplx, 4>& dst) {
    const json& v = require(m, w, key);
    if (!v.is_array() || v.size() != 4) throw ConfigError(w + "." + key + ": expected 4 complex amplitudes");
    for (std::size_t i = 0; i < 4; ++i) dst[i] = complex_value(v[i], w + "." + key);
  };
  amps("alpha", p.alpha);
  amps("beta", p.beta);
  return p;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(root, "config",
             {"model", "truncation", "observables", "field", "test_function", "statistics", "evolution",
              "initial_state", "output", "validate", "oracle"});

  RunConfig cfg;
  cfg.text = text;
  cfg.sha256 = sha256_hex(text);

  // model + truncation
  const json& m = require(root, "config", "model");
  if (!m.is_object()) throw ConfigError("model: expected an object");
  cfg.model_type = m.contains("type") && m.at("type").is_string() ? m.at("type").get<std::string>() : "";
  TruncatedSpace space;
  if (cfg.model_type != "system_free") {
    const json& tr = require(root, "config", "truncation");
    allow_keys(tr, "truncation", {"n_max", "m_max", "guard"});
    const int n_max = integer(require(tr, "truncation", "n_max"), "truncation.n_max");
    const int m_max = integer(require(tr, "truncation", "m_max"), "truncation.m_max");
    if (n_max < 0 || m_max < 0) throw ConfigError("truncation: n_max and m_max must be >= 0");
    space = TruncatedSpace(n_max, m_max);
    if (tr.contains("guard")) cfg.guard = integer(tr.at("guard"), "truncation.guard");
    if (cfg.guard < 0) throw ConfigError("truncation.guard must be >= 0");
  } else if (root.contains("truncation")) {
    throw ConfigError("truncation: not used by the system_free model");
  }

  try {
    if (cfg.model_type == "dpo") {
      cfg.dpo = dpo_params(m);
      cfg.model = dpo_model(*cfg.dpo, space);
    } else if (cfg.model_type == "system_free") {
      allow_keys(m, "model", {"type", "channels"});
      cfg.model = system_free_model(count(require(m, "model", "channels"), "model.channels"));
      cfg.guard = 0;
    } else if (cfg.model_type == "generic") {
      allow_keys(m, "model", {"type", "K", "R", "S", "label"});
      const SystemOperator K(space, triplets(require(m, "model", "K"), "model.K", space.dim()));
      const json& rs = require(m, "model", "R");
      if (!rs.is_array()) throw ConfigError("model.R: expected a list of operators");
      std::vector<SystemOperator> R;
      for (std::size_t i = 0; i < rs.size(); ++i)
        R.emplace_back(space, triplets(rs[i], "model.R[" + std::to_string(i) + "]", space.dim()));
      const auto d = static_cast<Eigen::Index>(R.size());
      ScatteringMatrix S = ScatteringMatrix::Identity(d, d);
      if (m.contains("S")) {
        const json& s = m.at("S");
        if (!s.is_array() || s.size() != R.size()) throw ConfigError("model.S: expected d rows");
        for (Eigen::Index i = 0; i < d; ++i) {
          if (!s[std::size_t(i)].is_array() || s[std::size_t(i)].size() != R.size()) {
            throw ConfigError("model.S: expected d columns");
          }
          for (Eigen::Index j = 0; j < d; ++j) S(i, j) = complex_value(s[std::size_t(i)][std::size_t(j)], "model.S");
        }
      }
      const std::string label =
          m.contains("label") && m.at("label").is_string() ? m.at("label").get<std::string>() : "generic";
      cfg.model = ModelSpec(K, std::move(R), std::move(S), label);
    } else {
      throw ConfigError("model.type must be one of dpo, system_free, generic");
    }
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  const std::size_t d = cfg.model.channels();

  // observables
  {
    const json& o = require(root, "config", "observables");
    allow_keys(o, "observables", {"preset", "eigenvalues", "h", "b", "c"});
    if (o.contains("preset")) {
      if (o.size() != 1 || o.at("preset") != "dpo") throw ConfigError("observables.preset: only \"dpo\" (alone) is known");
      if (!cfg.dpo) throw ConfigError("observables.preset dpo requires the dpo model");
      cfg.spec = dpo_observables(cfg.dpo->theta3, cfg.dpo->omega_c);
    } else {
      const json& eig = require(o, "observables", "eigenvalues");
      if (!eig.is_array() || eig.empty()) throw ConfigError("observables.eigenvalues: expected m rows");
      const std::size_t mobs = eig.size();
      std::vector<std::vector<double>> ev;
      for (std::size_t a = 0; a < mobs; ++a) {
        ev.push_back(number_list(eig[a], "observables.eigenvalues[" + std::to_string(a) + "]"));
        if (ev.back().size() != d) throw ConfigError("observables.eigenvalues: each row needs d entries");
      }
      std::vector<std::vector<TimeFunction>> h(mobs, std::vector<TimeFunction>(d));
      if (o.contains("h")) {
        const json& hv = o.at("h");
        if (!hv.is_array() || hv.size() != mobs) throw ConfigError("observables.h: expected m rows");
        for (std::size_t a = 0; a < mobs; ++a) {
          if (!hv[a].is_array() || hv[a].size() != d) throw ConfigError("observables.h: each row needs d entries");
          for (std::size_t i = 0; i < d; ++i)
            h[a][i] = time_function(hv[a][i], "observables.h[" + std::to_string(a) + "][" + std::to_string(i) + "]");
        }
      }
      std::vector<TimeFunction> b(d), c(mobs);
      if (o.contains("b")) {
        const json& bv = o.at("b");
        if (!bv.is_array() || bv.size() != d) throw ConfigError("observables.b: expected d entries");
        for (std::size_t i = 0; i < d; ++i) b[i] = time_function(bv[i], "observables.b[" + std::to_string(i) + "]");
      }
      if (o.contains("c")) {
        const json& cv = o.at("c");
        if (!cv.is_array() || cv.size() != mobs) throw ConfigError("observables.c: expected m entries");
        for (std::size_t a = 0; a < mobs; ++a) c[a] = time_function(cv[a], "observables.c[" + std::to_string(a) + "]");
      }
      try {
        cfg.spec = ObservableSpec(std::move(ev), std::move(h), std::move(b), std::move(c));
      } catch (const DimensionError& e) {
        throw ConfigError(std::string("observables: ") + e.what());
      }
      // ValidationError propagates: the data is well-formed but violates the measurement constraints.
    }
  }
  const std::size_t mobs = cfg.spec.observables();

  // field
  cfg.field = FieldProfile::vacuum(d);
  if (root.contains("field")) {
    const json& f = root.at("field");
    allow_keys(f, "field", {"laser", "components", "window_end"});
    const double window_end = number_or(f, "field", "window_end", std::numeric_limits<double>::infinity());
    if (!(window_end > 0.0)) throw ConfigError("field.window_end must be positive");
    if (f.contains("laser") && f.contains("components")) throw ConfigError("field: laser and components are exclusive");
    if (f.contains("laser")) {
      if (!f.at("laser").is_boolean()) throw ConfigError("field.laser: expected true/false");
      if (f.at("laser").get<bool>()) {
        if (!cfg.dpo) throw ConfigError("field.laser requires the dpo model");
        cfg.field = laser_field(*cfg.dpo, window_end, d);
      }
    } else if (f.contains("components")) {
      const json& cv = f.at("components");
      if (!cv.is_array() || cv.size() != d) throw ConfigError("field.components: expected d entries");
      std::vector<TimeFunction> comps;
      for (std::size_t i = 0; i < d; ++i) comps.push_back(time_function(cv[i], "field.components[" + std::to_string(i) + "]"));
      cfg.field = FieldProfile(std::move(comps), window_end);
    }
  }

  // test function
  cfg.k = TestFunction::zero(mobs);
  if (root.contains("test_function")) {
    const json& t = root.at("test_function");
    allow_keys(t, "test_function", {"breakpoints", "values"});
    std::vector<std::vector<double>> vals;
    const json& vv = require(t, "test_function", "values");
    if (!vv.is_array()) throw ConfigError("test_function.values: expected a list of kappa vectors");
    for (std::size_t l = 0; l < vv.size(); ++l) {
      vals.push_back(number_list(vv[l], "test_function.values"));
      if (vals.back().size() != mobs) throw ConfigError("test_function.values: each entry needs m components");
    }
    try {
      cfg.k = TestFunction(number_list(require(t, "test_function", "breakpoints"), "test_function.breakpoints"),
                           std::move(vals));
    } catch (const Error& e) {
      throw ConfigError(std::string("test_function: ") + e.what());
    }
  }

  // evolution
  if (root.contains("evolution")) {
    const json& e = root.at("evolution");
    const std::string w = "evolution";
    allow_keys(e, w, {"t_end", "dt", "method", "rtol", "atol", "store_stride", "freeze", "leakage_companion"});
    EvolutionConfig& ev = cfg.evolution;
    ev.t_end = number_or(e, w, "t_end", ev.t_end);
    ev.dt = number_or(e, w, "dt", 0.0);
    ev.rtol = number_or(e, w, "rtol", ev.rtol);
    ev.atol = number_or(e, w, "atol", ev.atol);
    if (e.contains("store_stride")) ev.store_stride = count(e.at("store_stride"), w + ".store_stride");
    if (e.contains("method")) {
      const std::string method = e.at("method").is_string() ? e.at("method").get<std::string>() : "";
      if (method == "rk4") {
        ev.method = StepMethod::Rk4;
      } else if (method == "adaptive") {
        ev.method = StepMethod::Adaptive;
      } else {
        throw ConfigError("evolution.method must be \"rk4\" or \"adaptive\"");
      }
    }
    auto flag = [&](const char* key, bool& dst) {
      if (!e.contains(key)) return;
      if (!e.at(key).is_boolean()) throw ConfigError(w + "." + key + ": expected true/false");
      dst = e.at(key).get<bool>();
    };
    flag("freeze", ev.freeze);
    flag("leakage_companion", ev.leakage_companion);
  }
  cfg.evolution.guard = cfg.guard;
  cfg.evolution.validate();

  // statistics
  if (root.contains("statistics")) {
    const json& s = root.at("statistics");
    const std::string w = "statistics";
    allow_keys(s, w, {"breakpoints", "axes", "n_max", "x_grid"});
    StatisticsSection st;
    st.breakpoints = number_list(require(s, w, "breakpoints"), w + ".breakpoints");
    const json& axes = require(s, w, "axes");
    if (!axes.is_array()) throw ConfigError(w + ".axes: expected a list");
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const std::string wa = w + ".axes[" + std::to_string(a) + "]";
      allow_keys(axes[a], wa, {"interval", "observable", "kind", "n_kappa", "kappa_max"});
      AxisRequest ar;
      ar.interval = count(require(axes[a], wa, "interval"), wa + ".interval");
      ar.observable = count(require(axes[a], wa, "observable"), wa + ".observable");
      const json& kind = require(axes[a], wa, "kind");
      if (kind == "counting") {
        ar.counting = true;
      } else if (kind == "homodyne") {
        ar.counting = false;
      } else {
        throw ConfigError(wa + ".kind must be \"counting\" or \"homodyne\"");
      }
      if (axes[a].contains("n_kappa")) ar.n_kappa = count(axes[a].at("n_kappa"), wa + ".n_kappa");
      if (axes[a].contains("kappa_max")) {
        const json& km = axes[a].at("kappa_max");
        if (!(km.is_string() && km == "auto")) ar.kappa_max = number(km, wa + ".kappa_max");
        if (ar.counting) throw ConfigError(wa + ".kappa_max applies to homodyne axes only");
        if (ar.kappa_max && !(*ar.kappa_max > 0.0)) throw ConfigError(wa + ".kappa_max must be positive");
      }
      st.axes.push_back(ar);
    }
    if (s.contains("n_max")) st.n_max = count(s.at("n_max"), w + ".n_max");
    if (s.contains("x_grid")) {
      const json& x = s.at("x_grid");
      allow_keys(x, w + ".x_grid", {"start", "stop", "points"});
      st.x_start = number(require(x, w + ".x_grid", "start"), w + ".x_grid.start");
      st.x_stop = number(require(x, w + ".x_grid", "stop"), w + ".x_grid.stop");
      st.x_points = count(require(x, w + ".x_grid", "points"), w + ".x_grid.points");
      if (!(st.x_stop > st.x_start) || st.x_points < 2) throw ConfigError(w + ".x_grid: need stop > start and points >= 2");
    }
    // Structural checks with placeholder kappa values.
    IncrementGrid probe;
    probe.breakpoints = st.breakpoints;
    for (const AxisRequest& ar : st.axes) probe.axes.push_back({ar.interval, ar.observable, std::vector<double>(ar.n_kappa)});
    probe.validate(mobs);
    cfg.statistics = std::move(st);
  }

  // initial state
  {
    int n = 0, mm = 0;
    if (root.contains("initial_state")) {
      const json& s = root.at("initial_state");
      allow_keys(s, "initial_state", {"type", "n", "m"});
      const json& type = require(s, "initial_state", "type");
      if (type == "vacuum") {
        if (s.contains("n") || s.contains("m")) throw ConfigError("initial_state: vacuum takes no n, m");
      } else if (type == "fock") {
        n = integer(require(s, "initial_state", "n"), "initial_state.n");
        mm = integer(require(s, "initial_state", "m"), "initial_state.m");
      } else {
        throw ConfigError("initial_state.type must be \"vacuum\" or \"fock\"");
      }
    }
    const TruncatedSpace& sp = cfg.model.space();
    if (!sp.contains(n, mm)) throw ConfigError("initial_state: level outside the truncation");
    cfg.rho0 = DenseMatrix::projector(basis_vector(sp, n, mm));
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    allow_keys(o, "output", {"directory"});
    if (o.contains("directory")) {
      if (!o.at("directory").is_string()) throw ConfigError("output.directory: expected a string");
      cfg.output_dir = o.at("directory").get<std::string>();
    }
  }
  if (root.contains("validate")) {
    const json& v = root.at("validate");
    allow_keys(v, "validate", {"guard", "random_vectors", "threshold"});
    if (v.contains("guard")) cfg.validate.guard = integer(v.at("guard"), "validate.guard");
    if (v.contains("random_vectors")) cfg.validate.random_vectors = count(v.at("random_vectors"), "validate.random_vectors");
    cfg.validate.threshold = number_or(v, "validate", "threshold", cfg.validate.threshold);
  }
  if (cfg.model_type == "system_free") cfg.validate.guard = 0;
  if (root.contains("oracle")) {
    const json& v = root.at("oracle");
    allow_keys(v, "oracle", {"n_max", "m_max", "t", "draws"});
    if (v.contains("n_max")) cfg.oracle.n_max = integer(v.at("n_max"), "oracle.n_max");
    if (v.contains("m_max")) cfg.oracle.m_max = integer(v.at("m_max"), "oracle.m_max");
    cfg.oracle.t = number_or(v, "oracle", "t", cfg.oracle.t);
    if (v.contains("draws")) cfg.oracle.draws = count(v.at("draws"), "oracle.draws");
    if ((cfg.oracle.n_max + 1) * (cfg.oracle.m_max + 1) > 12) throw ConfigError("oracle: truncation dimension must be <= 12");
  }

  try {
    cfg.context().validate();
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

}  // namespace qcm
