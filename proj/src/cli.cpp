#include "twomode/cli.hpp"
#include "twomode/mappings.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace twomode {

using json = nlohmann::ordered_json;

namespace {

// ---- JSON reading ----------------------------------------------------------------------

class Reader {
 public:
  std::optional<SweepSpec> sweep;

  static void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& path) {
    if (!obj.is_object()) throw ConfigError(where(path) + "must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const bool known = std::any_of(allowed.begin(), allowed.end(),
                                     [&](const char* a) { return it.key() == a; });
      if (!known) throw ConfigError("unknown key '" + join(path, it.key()) + "'");
    }
  }

  double real(const json& obj, const char* key, const std::string& path, double def) {
    if (!obj.contains(key)) return def;
    return real_value(obj.at(key), join(path, key));
  }

  double real_value(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_object() && v.contains("sweep")) return mark(v, path);
    throw ConfigError(where(path) + "must be a number");
  }

  static int integer(const json& obj, const char* key, const std::string& path, int def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 1e9) return static_cast<int>(d);
    }
    throw ConfigError(where(join(path, key)) + "must be an integer");
  }

  static std::string string(const json& obj, const char* key, const std::string& path,
                            const std::string& def) {
    if (!obj.contains(key)) return def;
    if (!obj.at(key).is_string()) throw ConfigError(where(join(path, key)) + "must be a string");
    return obj.at(key).get<std::string>();
  }

  cplx complex(const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) return {};
    const json& v = obj.at(key);
    const std::string p = join(path, key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_object() && !v.contains("sweep")) {
      check_keys(v, {"re", "im"}, p);
      return {real(v, "re", p, 0.0), real(v, "im", p, 0.0)};
    }
    if (v.is_object()) return {mark(v, p), 0.0};
    throw ConfigError(where(p) + "must be a number or {\"re\", \"im\"}");
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  static std::string where(const std::string& path) { return "'" + path + "' "; }

  double mark(const json& v, const std::string& path) {
    if (sweep) {
      throw ConfigError("more than one swept parameter ('" + sweep->parameter + "' and '" +
                        path + "')");
    }
    check_keys(v, {"sweep"}, path);
    const json& s = v.at("sweep");
    const std::string sp = path + ".sweep";
    SweepSpec spec;
    spec.parameter = path;
    if (s.is_object() && s.contains("values")) {
      check_keys(s, {"values"}, sp);
      const json& vals = s.at("values");
      if (!vals.is_array()) throw ConfigError(where(sp + ".values") + "must be an array");
      for (const json& x : vals) {
        if (!x.is_number()) throw ConfigError(where(sp + ".values") + "must hold numbers");
        spec.values.push_back(x.get<double>());
      }
    } else {
      check_keys(s, {"start", "stop", "count"}, sp);
      if (!s.contains("start") || !s.contains("stop") || !s.contains("count")) {
        throw ConfigError(where(sp) + "needs start, stop and count (or values)");
      }
      const json& a = s.at("start");
      const json& b = s.at("stop");
      if (!a.is_number() || !b.is_number()) {
        throw ConfigError(where(sp) + "start and stop must be numbers");
      }
      const int count = integer(s, "count", sp, 0);
      if (count < 0) throw ConfigError(where(sp + ".count") + "must be >= 0");
      const double lo = a.get<double>();
      const double hi = b.get<double>();
      for (int i = 0; i < count; ++i) {
        spec.values.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
      }
    }
    if (spec.values.empty()) throw ConfigError("sweep of '" + path + "' has no values");
    for (double x : spec.values) {
      if (!std::isfinite(x)) throw ConfigError("sweep of '" + path + "' has a non-finite value");
    }
    sweep = spec;
    return spec.values.front();
  }
};

FieldSpec read_field(Reader& rd, const json& j) {
  const std::string p = "field";
  if (j.is_string()) {
    if (j.get<std::string>() == "Vacuum") return field::Vacuum{};
    throw ConfigError("'field' given as a string must be \"Vacuum\"");
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError("'field' must be an object with a string \"type\"");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "Vacuum") {
    Reader::check_keys(j, {"type"}, p);
    return field::Vacuum{};
  }
  if (type == "Fock") {
    Reader::check_keys(j, {"type", "n"}, p);
    return field::Fock{Reader::integer(j, "n", p, 0)};
  }
  if (type == "FockPair" || type == "EtaNM" || type == "RhoNM") {
    Reader::check_keys(j, {"type", "n", "m"}, p);
    const int n = Reader::integer(j, "n", p, 0);
    const int m = Reader::integer(j, "m", p, 0);
    if (type == "FockPair") return field::FockPair{n, m};
    if (type == "EtaNM") return field::EtaNM{n, m};
    return field::RhoNM{n, m};
  }
  if (type == "Coherent") {
    Reader::check_keys(j, {"type", "alpha"}, p);
    return field::Coherent{rd.complex(j, "alpha", p)};
  }
  if (type == "CoherentPair") {
    Reader::check_keys(j, {"type", "alpha", "beta"}, p);
    const cplx a = rd.complex(j, "alpha", p);
    return field::CoherentPair{a, rd.complex(j, "beta", p)};
  }
  if (type == "Squeezed" || type == "SqueezedPair" || type == "TwoModeSqueezed") {
    Reader::check_keys(j, {"type", "xi"}, p);
    const cplx xi = rd.complex(j, "xi", p);
    if (type == "Squeezed") return field::Squeezed{xi};
    if (type == "SqueezedPair") return field::SqueezedPair{xi};
    return field::TwoModeSqueezed{xi};
  }
  if (type == "Thermal") {
    Reader::check_keys(j, {"type", "nbar"}, p);
    return field::Thermal{rd.real(j, "nbar", p, 0.0)};
  }
  throw ConfigError("unknown field type '" + type + "'");
}

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json field_json(const FieldSpec& spec) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum>) return json{{"type", "Vacuum"}};
        else if constexpr (std::is_same_v<T, field::Fock>) return json{{"type", "Fock"}, {"n", f.n}};
        else if constexpr (std::is_same_v<T, field::FockPair>)
          return json{{"type", "FockPair"}, {"n", f.n}, {"m", f.m}};
        else if constexpr (std::is_same_v<T, field::EtaNM>)
          return json{{"type", "EtaNM"}, {"n", f.n}, {"m", f.m}};
        else if constexpr (std::is_same_v<T, field::RhoNM>)
          return json{{"type", "RhoNM"}, {"n", f.n}, {"m", f.m}};
        else if constexpr (std::is_same_v<T, field::Coherent>)
          return json{{"type", "Coherent"}, {"alpha", complex_json(f.alpha)}};
        else if constexpr (std::is_same_v<T, field::CoherentPair>)
          return json{{"type", "CoherentPair"},
                      {"alpha", complex_json(f.alpha)},
                      {"beta", complex_json(f.beta)}};
        else if constexpr (std::is_same_v<T, field::Squeezed>)
          return json{{"type", "Squeezed"}, {"xi", complex_json(f.xi)}};
        else if constexpr (std::is_same_v<T, field::SqueezedPair>)
          return json{{"type", "SqueezedPair"}, {"xi", complex_json(f.xi)}};
        else if constexpr (std::is_same_v<T, field::TwoModeSqueezed>)
          return json{{"type", "TwoModeSqueezed"}, {"xi", complex_json(f.xi)}};
        else return json{{"type", "Thermal"}, {"nbar", f.nbar}};
      },
      spec);
}

json& at_path(json& j, const std::string& path) {
  json* node = &j;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    node = &(*node)[key];
    if (dot == std::string::npos) return *node;
    pos = dot + 1;
  }
}

json config_json(const RunConfig& c) {
  json j;
  j["scheme"] = to_string(c.scheme);
  j["phi"] = c.phi;
  j["g"] = c.g;
  j["atomic"] = to_string(c.atomic);
  j["field"] = field_json(c.field);
  if (c.cutoffs.size() == 1) j["cutoff"] = c.cutoffs.front();
  else if (c.cutoffs.empty()) j["cutoff"] = 0;
  else j["cutoff"] = c.cutoffs;
  j["excitation_cap"] = c.excitation_cap ? json(*c.excitation_cap) : json(nullptr);
  j["backend"] = to_string(c.backend);
  j["time"] = json{{"t_max", c.grid.t_max}, {"samples", c.grid.samples}};
  j["tolerances"] = json{{"tau_zero", c.classify.tau_zero},
                         {"delta_dead", c.classify.delta_dead},
                         {"tau_tail", c.tolerances.tau_tail},
                         {"tau_leak", c.tolerances.tau_leak},
                         {"tau_leak_cutoff", c.tolerances.tau_leak_cutoff}};
  j["classify"] = json{{"minimum_fraction", c.classify.minimum_fraction},
                       {"min_samples", c.classify.min_samples}};
  j["measures"] = c.measures;
  j["verify"] = json{{"bound", c.verify_bound}};
  j["output"] = json{{"csv", c.csv_path ? json(*c.csv_path) : json(nullptr)},
                     {"json", c.json_path ? json(*c.json_path) : json(nullptr)}};
  if (c.sweep) at_path(j, c.sweep->parameter) = json{{"sweep", json{{"values", c.sweep->values}}}};
  return j;
}

template <class F>
auto config_guard(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

RunConfig read_config(const json& j) {
  Reader rd;
  RunConfig c;
  Reader::check_keys(j,
                     {"scheme", "phi", "g", "atomic", "field", "cutoff", "excitation_cap",
                      "backend", "time", "tolerances", "classify", "measures", "verify", "output"},
                     "");
  config_guard("scheme", [&] {
    c.scheme = parse_scheme(Reader::string(j, "scheme", "", to_string(c.scheme)));
  });
  c.phi = rd.real(j, "phi", "", c.phi);
  c.g = rd.real(j, "g", "", c.g);
  if (!(c.g > 0.0) || !std::isfinite(c.g)) throw ConfigError("'g' must be positive");
  config_guard("atomic", [&] {
    c.atomic = parse_atomic_label(Reader::string(j, "atomic", "", to_string(c.atomic)));
  });
  if (j.contains("field")) c.field = read_field(rd, j.at("field"));
  config_guard("field", [&] { validate(c.field); });

  if (j.contains("cutoff")) {
    const json& v = j.at("cutoff");
    if (v.is_array()) {
      json wrap;
      for (std::size_t i = 0; i < v.size(); ++i) {
        wrap["c"] = v[i];
        c.cutoffs.push_back(Reader::integer(wrap, "c", "cutoff", 0));
      }
      if (c.cutoffs.empty() || c.cutoffs.size() > 2) {
        throw ConfigError("'cutoff' array must have one or two entries");
      }
    } else {
      const int d = Reader::integer(j, "cutoff", "", 0);
      if (d != 0) c.cutoffs = {d};
    }
    for (int d : c.cutoffs) {
      if (d < 2) throw ConfigError("'cutoff' entries must be >= 2 (or 0 for automatic)");
    }
  }
  if (j.contains("excitation_cap") && !j.at("excitation_cap").is_null()) {
    c.excitation_cap = Reader::integer(j, "excitation_cap", "", 0);
  }
  config_guard("backend", [&] {
    c.backend = parse_backend(Reader::string(j, "backend", "", to_string(c.backend)));
  });

  if (j.contains("time")) {
    const json& t = j.at("time");
    Reader::check_keys(t, {"t_max", "samples"}, "time");
    c.grid.t_max = rd.real(t, "t_max", "time", c.grid.t_max);
    c.grid.samples = Reader::integer(t, "samples", "time", c.grid.samples);
  }
  config_guard("time", [&] { c.grid.validate(); });

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    const std::string p = "tolerances";
    Reader::check_keys(t, {"tau_zero", "delta_dead", "tau_tail", "tau_leak", "tau_leak_cutoff"}, p);
    c.classify.tau_zero = rd.real(t, "tau_zero", p, c.classify.tau_zero);
    c.classify.delta_dead = rd.real(t, "delta_dead", p, c.classify.delta_dead);
    c.tolerances.tau_tail = rd.real(t, "tau_tail", p, c.tolerances.tau_tail);
    c.tolerances.tau_leak = rd.real(t, "tau_leak", p, c.tolerances.tau_leak);
    c.tolerances.tau_leak_cutoff = rd.real(t, "tau_leak_cutoff", p, c.tolerances.tau_leak_cutoff);
  }
  for (double x : {c.classify.tau_zero, c.classify.delta_dead, c.tolerances.tau_tail,
                   c.tolerances.tau_leak, c.tolerances.tau_leak_cutoff}) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("tolerances must be positive");
  }
  if (j.contains("classify")) {
    const json& t = j.at("classify");
    Reader::check_keys(t, {"minimum_fraction", "min_samples"}, "classify");
    c.classify.minimum_fraction =
        rd.real(t, "minimum_fraction", "classify", c.classify.minimum_fraction);
    const int ms = Reader::integer(t, "min_samples", "classify",
                                   static_cast<int>(c.classify.min_samples));
    if (ms < 2) throw ConfigError("'classify.min_samples' must be >= 2");
    c.classify.min_samples = static_cast<std::size_t>(ms);
  }

  if (j.contains("measures")) {
    const json& m = j.at("measures");
    if (!m.is_array()) throw ConfigError("'measures' must be an array of names");
    c.measures.clear();
    for (const json& x : m) {
      if (!x.is_string()) throw ConfigError("'measures' must be an array of names");
      const std::string name = x.get<std::string>();
      if (std::find(kMeasureNames.begin(), kMeasureNames.end(), name) == kMeasureNames.end()) {
        throw ConfigError("unknown measure '" + name + "'");
      }
      if (std::find(c.measures.begin(), c.measures.end(), name) != c.measures.end()) {
        throw ConfigError("measure '" + name + "' listed twice");
      }
      c.measures.push_back(name);
    }
  }
  if (j.contains("verify")) {
    Reader::check_keys(j.at("verify"), {"bound"}, "verify");
    c.verify_bound = rd.real(j.at("verify"), "bound", "verify", c.verify_bound);
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    Reader::check_keys(o, {"csv", "json"}, "output");
    if (o.contains("csv") && !o.at("csv").is_null()) c.csv_path = Reader::string(o, "csv", "output", "");
    if (o.contains("json") && !o.at("json").is_null()) c.json_path = Reader::string(o, "json", "output", "");
  }

  const int declared = field_modes(c.field);
  const int modes = c.scheme == Scheme::SMSC ? 1 : 2;
  if (declared != 0 && declared != modes) {
    throw ConfigError(describe(c.field) + " does not fit the " + std::to_string(modes) +
                      "-mode field of " + to_string(c.scheme));
  }
  if (c.cutoffs.size() == 2 && modes == 1) {
    throw ConfigError("'cutoff' has two entries but " + to_string(c.scheme) + " has one mode");
  }
  c.sweep = rd.sweep;
  return c;
}

// ---- output ----------------------------------------------------------------------------

void write_text(const CliOptions& opt, const std::optional<std::string>& cfg_path,
                const std::string& text, std::ostream& out) {
  const std::optional<std::string> path = opt.out_path ? opt.out_path : cfg_path;
  if (!path || *path == "-") {
    out << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + *path + "'");
  f << text;
  if (!f) throw ConfigError("failed writing '" + *path + "'");
}

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json classification_json(const EntanglementClass& c) {
  json j;
  j["label"] = to_string(c.label);
  j["first_life"] = optional_json(c.first_life);
  auto& dead = j["dead_intervals"] = json::array();
  for (const auto& i : c.dead_intervals) dead.push_back(json::array({i.begin, i.end}));
  j["touch_points"] = c.touch_points;
  j["revives"] = c.revives;
  j["min_after_life"] = c.min_after_life;
  j["window"] = json::array({c.window.begin, c.window.end});
  return j;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const TruncationError& e) {
    err << "truncation: " << e.what();
    if (e.required_cutoff() > 0) err << " (cutoff " << e.required_cutoff() << " would suffice)";
    err << '\n';
    return kExitTruncation;
  } catch (const NumericalError& e) {
    err << "numerical check failed: " << e.what() << '\n';
    return kExitTruncation;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

RunConfig load_for(const CliOptions& opt, bool sweep_expected) {
  if (opt.config_path.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_run_config(opt.config_path);
  if (sweep_expected && !cfg.sweep) throw ConfigError("no parameter is marked for sweeping");
  if (!sweep_expected && cfg.sweep) {
    throw ConfigError("swept parameter '" + cfg.sweep->parameter + "' is only valid for sweep");
  }
  return cfg;
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& job) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads))));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) job(i);
  };
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

}  // namespace

// ---- config ----------------------------------------------------------------------------

Scenario RunConfig::scenario() const {
  if (cutoffs.size() == 2 && cutoffs[0] != cutoffs[1]) {
    throw TruncationError("mode cutoffs " + std::to_string(cutoffs[0]) + " and " +
                              std::to_string(cutoffs[1]) +
                              " differ; the mode transform is exact only for equal cutoffs",
                          std::max(cutoffs[0], cutoffs[1]));
  }
  Scenario s;
  s.scheme = scheme;
  s.atomic = atomic;
  s.field = field;
  s.g = g;
  s.cutoff = cutoffs.empty() ? 0 : cutoffs.front();
  s.excitation_cap = excitation_cap;
  s.grid = grid;
  s.phi = phi;
  s.backend = backend;
  return s;
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return read_config(j);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

// ---- simulate --------------------------------------------------------------------------

SimulationResult simulate(const RunConfig& cfg) {
  const Scenario s = evolved_scenario(cfg.scenario());
  const ScenarioTolerances& tol = cfg.tolerances;
  const bool want_fields = std::find(cfg.measures.begin(), cfg.measures.end(),
                                     "negativity_fields") != cfg.measures.end();
  const auto engine = scenario_dynamics(s, tol);
  if (want_fields) {
    const ModelConfig mc = scenario_config(s, tol);
    if (!assemble_initial(s.atomic, s.field, mc, tol.tau_tail).field.is_pure()) {
      throw ConfigError("negativity_fields needs a pure initial state");
    }
    const auto rho = engine->field(0.0);
    if (!rho || rho->layout().size() != 2) {
      throw ConfigError("negativity_fields needs an engine that keeps both field modes "
                        "(backend block_exact, or the DJC model) and at most 1024 field states");
    }
  }

  SimulationResult r;
  r.cutoff = scenario_cutoff(s, tol);
  r.leakage = engine->leakage();
  r.columns.push_back("t");
  for (const auto& m : cfg.measures) r.columns.push_back(m);
  r.columns.push_back("leakage");

  const std::vector<double> times = s.grid.times();
  EntanglementSeries series;
  series.times = times;
  for (double t : times) {
    const Matrix rho = engine->atomic(t);
    const double c = concurrence(rho);
    series.values.push_back(c);
    std::vector<double> row{t};
    for (const auto& m : cfg.measures) {
      if (m == "concurrence") row.push_back(c);
      else if (m == "eof") row.push_back(eof(c));
      else if (m == "negativity_atoms") row.push_back(negativity_atoms(rho));
      else {
        const DensityMatrix f = *engine->field(t);
        row.push_back(negativity(f, {f.layout().labels().front()}));
      }
    }
    row.push_back(r.leakage);
    r.rows.push_back(std::move(row));
  }
  if (series.times.size() >= cfg.classify.min_samples) {
    r.classification = classify_series(series, cfg.classify, concurrence_callback(*engine));
  }
  return r;
}

std::string to_csv(const SimulationResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (i) out += ',';
    out += r.columns[i];
  }
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

int cmd_simulate(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_for(opt, false);
    const SimulationResult r = simulate(cfg);
    if (opt.json) {
      json j;
      j["config"] = config_json(cfg);
      j["cutoff"] = r.cutoff;
      j["leakage"] = r.leakage;
      j["classification"] =
          r.classification ? classification_json(*r.classification) : json(nullptr);
      j["columns"] = r.columns;
      j["rows"] = r.rows;
      write_text(opt, cfg.json_path, j.dump(2) + "\n", out);
    } else {
      write_text(opt, cfg.csv_path, to_csv(r), out);
    }
    return static_cast<int>(kExitOk);
  });
}

// ---- sweep -----------------------------------------------------------------------------

std::vector<SweepRow> sweep(const RunConfig& cfg, int threads) {
  if (!cfg.sweep) throw ConfigError("no parameter is marked for sweeping");
  const SweepSpec& sw = *cfg.sweep;
  std::vector<RunConfig> points;
  const json base = config_json(cfg);
  for (double v : sw.values) {
    json j = base;
    at_path(j, sw.parameter) = v;
    points.push_back(read_config(j));
    points.back().scenario();
  }
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.value = sw.values[i];
    try {
      const ScenarioOutcome o =
          classify_scenario(points[i].scenario(), points[i].classify, points[i].tolerances);
      row.label = o.cls.label;
      row.first_life = o.cls.first_life;
      row.min_after_life = o.cls.min_after_life;
      row.max_concurrence = o.max_concurrence;
      row.revives = o.cls.revives;
      row.cutoff = o.cutoff;
    } catch (const TruncationError& e) {
      row.valid = false;
      row.error = e.what();
    } catch (const NumericalError& e) {
      row.valid = false;
      row.error = e.what();
    }
  });
  return rows;
}

std::string to_csv(const std::vector<SweepRow>& rows, const std::string& parameter) {
  std::string out =
      parameter + ",label,first_life,min_concurrence_after_life,max_concurrence,revives,cutoff\n";
  for (const auto& r : rows) {
    out += format_double(r.value);
    if (!r.valid) {
      out += ",INVALID,,,,,\n";
      continue;
    }
    out += ',' + to_string(r.label) + ',';
    if (r.first_life) out += format_double(*r.first_life);
    out += ',';
    if (r.first_life) out += format_double(r.min_after_life);
    out += ',' + format_double(r.max_concurrence);
    out += r.revives ? ",1," : ",0,";
    out += std::to_string(r.cutoff) + '\n';
  }
  return out;
}

int cmd_sweep(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_for(opt, true);
    const std::vector<SweepRow> rows = sweep(cfg, opt.threads);
    if (opt.json) {
      json j;
      j["parameter"] = cfg.sweep->parameter;
      j["window"] = json::array({0.0, cfg.grid.t_max});
      auto& arr = j["rows"] = json::array();
      for (const auto& r : rows) {
        json rj;
        rj["value"] = r.value;
        rj["valid"] = r.valid;
        if (r.valid) {
          rj["label"] = to_string(r.label);
          rj["first_life"] = optional_json(r.first_life);
          rj["min_concurrence_after_life"] =
              r.first_life ? json(r.min_after_life) : json(nullptr);
          rj["max_concurrence"] = r.max_concurrence;
          rj["revives"] = r.revives;
          rj["cutoff"] = r.cutoff;
        } else {
          rj["error"] = r.error;
        }
        arr.push_back(std::move(rj));
      }
      write_text(opt, cfg.json_path, j.dump(2) + "\n", out);
    } else {
      write_text(opt, cfg.csv_path, to_csv(rows, cfg.sweep->parameter), out);
    }
    for (const auto& r : rows) {
      if (!r.valid) {
        err << "truncation at " << cfg.sweep->parameter << " = " << format_double(r.value) << ": "
            << r.error << '\n';
      }
    }
    const bool ok = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.valid; });
    return static_cast<int>(ok ? kExitOk : kExitTruncation);
  });
}

// ---- verify ----------------------------------------------------------------------------

int cmd_verify(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_for(opt, false);
    if (cfg.scheme != Scheme::TMSC && cfg.scheme != Scheme::TMAC) {
      throw ConfigError("verify needs scheme TMSC or TMAC");
    }
    const Scenario s = cfg.scenario();
    const EquivalenceReport rep = verify_equivalence(s.atomic, s.field, s.scheme, s.grid, s.cutoff,
                                                     s.g, cfg.tolerances.tau_leak);
    const bool pass = rep.max_trace_distance < cfg.verify_bound;
    std::string text;
    if (opt.json) {
      json j;
      j["scheme"] = to_string(cfg.scheme);
      j["max_trace_distance"] = rep.max_trace_distance;
      j["bound"] = cfg.verify_bound;
      j["cutoff"] = rep.cutoff;
      j["leakage"] = rep.leakage;
      j["pass"] = pass;
      text = j.dump(2) + "\n";
    } else {
      text = "max_trace_distance," + format_double(rep.max_trace_distance) + "\nbound," +
             format_double(cfg.verify_bound) + "\ncutoff," + std::to_string(rep.cutoff) +
             "\nleakage," + format_double(rep.leakage) + "\nresult," + (pass ? "PASS" : "FAIL") +
             "\n";
    }
    write_text(opt, opt.json ? cfg.json_path : cfg.csv_path, text, out);
    return static_cast<int>(pass ? kExitOk : kExitMismatch);
  });
}

// ---- table1 ----------------------------------------------------------------------------

int cmd_table1(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg;
    if (!opt.config_path.empty()) cfg = load_for(opt, false);
    std::vector<Table1Cell> cells = table1_cells();
    if (opt.only) {
      std::erase_if(cells, [&](const Table1Cell& c) { return c.scheme != *opt.only; });
    }
    const Table1Report rep =
        table1_harness(cells, cfg.grid, opt.threads, cfg.classify, cfg.tolerances);
    if (opt.json) write_text(opt, cfg.json_path, table1_json(rep), out);
    else write_text(opt, std::nullopt, table1_text(rep), out);
    if (!rep.all_valid()) return static_cast<int>(kExitTruncation);
    return static_cast<int>(rep.all_pass() ? kExitOk : kExitMismatch);
  });
}

}  // namespace twomode
