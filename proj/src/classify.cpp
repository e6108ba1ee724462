#include "twomode/classify.hpp"

#include "twomode/mappings.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace twomode {

namespace {

constexpr double kGolden = 0.6180339887498949;

double bisect_edge(const ConcurrenceFn& c, double alive, double dead, double tau, double width) {
  // keeps c(alive) > tau >= c(dead)
  while (std::abs(dead - alive) > width) {
    const double mid = 0.5 * (alive + dead);
    if (c(mid) > tau) alive = mid;
    else dead = mid;
  }
  return 0.5 * (alive + dead);
}

struct Minimum {
  double t;
  double value;
};

Minimum golden_minimum(const ConcurrenceFn& c, double a, double b, double tau) {
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = c(x1), f2 = c(x2);
  for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    if (std::min(f1, f2) <= tau) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = c(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = c(x2);
    }
  }
  return f1 <= f2 ? Minimum{x1, f1} : Minimum{x2, f2};
}

std::vector<Interval> merge(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
  std::vector<Interval> out;
  for (const auto& i : v) {
    if (!out.empty() && i.begin <= out.back().end) out.back().end = std::max(out.back().end, i.end);
    else out.push_back(i);
  }
  return out;
}

}  // namespace

std::string to_string(EntanglementLabel l) {
  switch (l) {
    case EntanglementLabel::NONE: return "NONE";
    case EntanglementLabel::SD: return "SD";
    case EntanglementLabel::DI: return "DI";
    case EntanglementLabel::AL: return "AL";
  }
  return "?";
}

EntanglementLabel parse_label(std::string_view s) {
  if (s == "NONE") return EntanglementLabel::NONE;
  if (s == "SD") return EntanglementLabel::SD;
  if (s == "DI") return EntanglementLabel::DI;
  if (s == "AL") return EntanglementLabel::AL;
  throw std::invalid_argument("unknown entanglement label '" + std::string(s) + "'");
}

void EntanglementSeries::validate() const {
  if (times.size() != values.size()) throw std::invalid_argument("series: times and values differ in length");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("series: times must increase strictly");
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < -1e-12 || v > 1.0 + 1e-12) {
      throw std::invalid_argument("series: concurrence outside [0, 1]");
    }
  }
}

EntanglementClass classify_series(EntanglementSeries& s, const ClassifyOptions& opt,
                                  const ConcurrenceFn& callback) {
  s.validate();
  if (s.times.size() < opt.min_samples) {
    throw std::invalid_argument("series: at least " + std::to_string(opt.min_samples) +
                                " samples are required");
  }
  const double tau = opt.tau_zero;
  const auto& t = s.times;
  const auto& v = s.values;
  const std::size_t n = t.size();

  EntanglementClass out;
  out.window = {t.front(), t.back()};
  out.low_confidence = !callback;

  std::size_t i0 = 0;
  while (i0 < n && v[i0] <= tau) ++i0;
  if (i0 == n) {
    out.label = EntanglementLabel::NONE;
    out.min_after_life = *std::max_element(v.begin(), v.end());
    return out;
  }
  out.first_life = t[i0];
  const double vmax = *std::max_element(v.begin(), v.end());
  const double width = opt.delta_dead / 100.0;
  out.min_after_life = *std::min_element(v.begin() + i0, v.end());

  std::vector<Interval> dead;
  std::vector<double> touches;
  auto record = [&](double lo, double hi) {
    if (hi - lo >= opt.delta_dead) dead.push_back({lo, hi});
    else touches.push_back(0.5 * (lo + hi));
  };

  for (std::size_t j = i0 + 1; j < n;) {
    if (v[j] <= tau) {
      // run of sampled zeros
      std::size_t b = j;
      while (b + 1 < n && v[b + 1] <= tau) ++b;
      double lo = t[j], hi = t[b];
      if (callback) {
        lo = bisect_edge(callback, t[j - 1], t[j], tau, width);
        s.refinements.push_back({Refinement::Kind::DeadEdge, t[j - 1], t[j], callback(lo)});
        if (b + 1 < n) {
          hi = bisect_edge(callback, t[b + 1], t[b], tau, width);
          s.refinements.push_back({Refinement::Kind::DeadEdge, t[b], t[b + 1], callback(hi)});
        }
      } else {
        // half a step on each side
        lo = 0.5 * (t[j - 1] + t[j]);
        hi = b + 1 < n ? 0.5 * (t[b] + t[b + 1]) : t[b];
      }
      record(lo, hi);
      j = b + 1;
      continue;
    }
    const bool local_min = j + 1 < n && v[j] <= v[j - 1] && v[j] <= v[j + 1];
    if (local_min && callback) {
      const double kink = std::max(v[j - 1] - v[j], v[j + 1] - v[j]);
      if (v[j] <= opt.minimum_fraction * vmax || v[j] <= kink) {
        const Minimum m = golden_minimum(callback, t[j - 1], t[j + 1], tau);
        s.refinements.push_back({Refinement::Kind::Minimum, t[j - 1], t[j + 1], m.value});
        out.min_after_life = std::min(out.min_after_life, m.value);
        if (m.value <= tau) {
          const double lo = bisect_edge(callback, t[j - 1], m.t, tau, width);
          const double hi = bisect_edge(callback, t[j + 1], m.t, tau, width);
          record(lo, hi);
        }
      }
    }
    ++j;
  }

  out.dead_intervals = merge(std::move(dead));
  for (double p : touches) {
    const bool inside = std::any_of(out.dead_intervals.begin(), out.dead_intervals.end(),
                                    [&](const Interval& i) { return p >= i.begin && p <= i.end; });
    if (!inside) out.touch_points.push_back(p);
  }
  std::sort(out.touch_points.begin(), out.touch_points.end());
  out.min_after_life = std::max(0.0, out.min_after_life);
  for (const auto& i : out.dead_intervals) {
    if (i.end < t.back()) out.revives = true;
  }
  if (!out.dead_intervals.empty()) out.label = EntanglementLabel::SD;
  else if (!out.touch_points.empty()) out.label = EntanglementLabel::DI;
  else out.label = EntanglementLabel::AL;
  return out;
}

ConcurrenceFn concurrence_callback(const ReducedDynamics& engine) {
  return [&engine](double t) {
    const Matrix rho = engine.atomic(t);
    const double defect = std::abs(rho.trace().real() - 1.0);
    if (defect > Tolerances::trace) {
      std::ostringstream os;
      os << "atomic trace defect " << defect << " at t=" << t;
      throw TruncationError(os.str(), 0);
    }
    return concurrence(rho);
  };
}

EntanglementSeries concurrence_series(const ReducedDynamics& engine, const TimeGrid& grid) {
  const ConcurrenceFn c = concurrence_callback(engine);
  EntanglementSeries s;
  s.times = grid.times();
  s.values.reserve(s.times.size());
  for (double t : s.times) s.values.push_back(c(t));
  return s;
}

ThresholdResult find_threshold(const std::function<EntanglementLabel(double)>& label_at,
                               double lo, double hi, int samples, double width) {
  if (samples < 8) throw std::invalid_argument("find_threshold: at least 8 samples");
  if (!(hi > lo)) throw std::invalid_argument("find_threshold: empty range");
  ThresholdResult r{};
  for (int k = 0; k < samples; ++k) {
    const double x = lo + (hi - lo) * k / (samples - 1);
    r.samples.emplace_back(x, label_at(x));
  }
  int changes = 0;
  std::size_t at = 0;
  for (std::size_t k = 1; k < r.samples.size(); ++k) {
    if (r.samples[k].second != r.samples[k - 1].second) {
      ++changes;
      at = k;
    }
  }
  if (changes != 1) {
    std::ostringstream os;
    os << "find_threshold: expected one label change, sampled";
    for (const auto& [x, l] : r.samples) os << ' ' << x << ':' << to_string(l);
    throw AmbiguousThresholdError(os.str());
  }
  r.below = r.samples[at - 1].second;
  r.above = r.samples[at].second;
  double a = r.samples[at - 1].first, b = r.samples[at].first;
  while (b - a > width) {
    const double mid = 0.5 * (a + b);
    const EntanglementLabel l = label_at(mid);
    if (l == r.below) a = mid;
    else if (l == r.above) b = mid;
    else {
      throw AmbiguousThresholdError("find_threshold: third label " + to_string(l) + " at " +
                                    std::to_string(mid));
    }
  }
  r.lo = a;
  r.hi = b;
  r.value = 0.5 * (a + b);
  return r;
}

// ---- scenarios -------------------------------------------------------------------------

int scenario_cutoff(const Scenario& s, const ScenarioTolerances& tol) {
  if (s.cutoff > 0) return s.cutoff;
  const int modes = s.scheme == Scheme::SMSC ? 1 : 2;
  const BlockStructure blocks = s.scheme == Scheme::DJC ? BlockStructure::PerMode : BlockStructure::Total;
  return auto_cutoff(s.field, modes, tol.tau_tail, tol.tau_leak_cutoff, 6, blocks);
}

ModelConfig scenario_config(const Scenario& s, const ScenarioTolerances& tol) {
  ModelConfig cfg;
  cfg.scheme = s.scheme;
  cfg.phi = s.phi;
  cfg.g = s.g;
  cfg.grid = s.grid;
  cfg.cutoff = scenario_cutoff(s, tol);
  cfg.excitation_cap = s.excitation_cap;
  cfg.validate();
  return cfg;
}

Scenario evolved_scenario(const Scenario& s) {
  if (s.backend == Backend::Auto) {
    if (const auto image = mapped_field(s.field, s.scheme)) {
      Scenario r = s;
      r.scheme = s.scheme == Scheme::TMSC ? Scheme::SMSC : Scheme::DJC;
      r.field = *image;
      return r;
    }
  }
  return s;
}

std::unique_ptr<ReducedDynamics> scenario_dynamics(const Scenario& original, const ScenarioTolerances& tol) {
  const Scenario s = evolved_scenario(original);
  const ModelConfig cfg = scenario_config(s, tol);
  const SystemState init = assemble_initial(s.atomic, s.field, cfg, tol.tau_tail);
  auto engine = make_dynamics(cfg, init, s.backend);
  if (engine->leakage() > tol.tau_leak) {
    std::ostringstream os;
    os << "excitation leakage " << engine->leakage() << " exceeds " << tol.tau_leak
       << " at cutoff " << cfg.cutoff;
    throw TruncationError(os.str(), 0);
  }
  return engine;
}

ScenarioOutcome classify_scenario(const Scenario& s, const ClassifyOptions& opt,
                                  const ScenarioTolerances& tol) {
  const auto engine = scenario_dynamics(s, tol);
  EntanglementSeries series = concurrence_series(*engine, s.grid);
  ScenarioOutcome out;
  out.cutoff = scenario_cutoff(evolved_scenario(s), tol);
  out.leakage = engine->leakage();
  out.max_concurrence = *std::max_element(series.values.begin(), series.values.end());
  out.cls = classify_series(series, opt, concurrence_callback(*engine));
  return out;
}

// ---- Table I ---------------------------------------------------------------------------

namespace {

CellExpectation parse_expectation(const std::string& text) {
  CellExpectation e;
  e.text = text;
  std::string rest = text;
  if (rest.rfind("No", 0) == 0) {
    e.generation = false;
    e.labels = {EntanglementLabel::NONE};
    return e;
  }
  if (rest.rfind("Yes", 0) == 0) {
    e.generation = true;
    const auto comma = rest.find(',');
    rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
  }
  std::stringstream ss(rest);
  std::string tok;
  while (std::getline(ss, tok, '/')) {
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    e.labels.push_back(parse_label(tok));
  }
  return e;
}

const char* kColumns = "ABCDE";
const AtomicLabel kColumnAtoms[5] = {AtomicLabel::EE, AtomicLabel::EG, AtomicLabel::GG,
                                     AtomicLabel::PHI, AtomicLabel::PSI};

// expected entries, rows 1..7, columns A..E; '*' marks the n = m footnote
const char* kTmsc[7][5] = {
    {"No", "Yes, DI", "Yes, DI", "AL", "DI"},
    {"No", "Yes, DI", "Yes*, DI/SD", "SD", "SD"},
    {"No", "Yes, DI", "Yes, SD", "SD", "SD"},
    {"No", "Yes, DI", "Yes, SD", "AL/SD", "SD"},
    {"Yes, AL/SD", "Yes, SD", "Yes, AL/SD", "AL/SD", "AL/SD"},
    {"No", "Yes, DI", "Yes, SD", "AL/SD", "SD"},
    {"Yes, AL/SD", "Yes, SD", "Yes, AL/SD", "AL", "SD"},
};
const char* kTmac[7][5] = {
    {"No", "No", "No", "SD", "DI"},
    {"Yes*, SD", "Yes*, SD", "Yes*, SD/DI", "SD", "SD/AL"},
    {"No", "No", "No", "SD", "SD"},
    {"No", "No", "No", "SD", "SD"},
    {"No", "No", "No", "SD", "SD"},
    {"Yes, SD", "Yes, SD", "Yes, SD", "SD", "SD"},
    {"No", "No", "No", "SD", "SD"},
};

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string pair_text(int n, int m) { return "n=" + std::to_string(n) + ",m=" + std::to_string(m); }

struct Extra {
  Scheme scheme;
  int row;
  char column;
  double p1, p2;
};

// instances added to particular cells so that both branches of "A/B" entries occur
const Extra kExtras[] = {
    {Scheme::TMSC, 2, 'C', 2, 0},
    {Scheme::TMSC, 5, 'D', 0.3, 0},
    {Scheme::TMSC, 7, 'A', 1.7, 0},
    {Scheme::TMAC, 2, 'C', 2, 0},
};

std::vector<CellInstance> row_instances(Scheme scheme, int row, char column, bool footnote) {
  std::vector<CellInstance> v;
  switch (row) {
    case 1: v = {table1_instance(scheme, 1)}; break;
    case 2:
      v = {table1_instance(scheme, 2, 1, 0), table1_instance(scheme, 2, 1, 1)};
      v[1].footnote = footnote;
      break;
    case 3:
      // |eta_1m> reduces to |1> in SMSC, the exceptional Fock state for |gg>
      if (scheme == Scheme::TMSC) v = {table1_instance(scheme, 3, 2, 0), table1_instance(scheme, 3, 3, 0)};
      else v = {table1_instance(scheme, 3, 1, 0), table1_instance(scheme, 3, 1, 1)};
      break;
    case 4: v = {table1_instance(scheme, 4, 0.3), table1_instance(scheme, 4, 1.0)}; break;
    case 5: v = {table1_instance(scheme, 5, 1.0, 0.0)}; break;
    case 6: v = {table1_instance(scheme, 6, 0.5), table1_instance(scheme, 6, 1.2)}; break;
    default: v = {table1_instance(scheme, 7, 0.5), table1_instance(scheme, 7, 1.2)}; break;
  }
  for (const Extra& e : kExtras) {
    if (e.scheme == scheme && e.row == row && e.column == column) v.push_back(table1_instance(scheme, row, e.p1, e.p2));
  }
  return v;
}

}  // namespace

CellInstance table1_instance(Scheme scheme, int row, double p1, double p2) {
  if (scheme != Scheme::TMSC && scheme != Scheme::TMAC) {
    throw std::invalid_argument("table1_instance: scheme must be TMSC or TMAC");
  }
  const bool sc = scheme == Scheme::TMSC;
  const double h = 1.0 / std::sqrt(2.0);
  const int n = static_cast<int>(std::lround(p1)), m = static_cast<int>(std::lround(p2));
  CellInstance c;
  switch (row) {
    case 1:
      c = {field::Vacuum{}, field::Vacuum{}, "vacuum", false};
      break;
    case 2:
      c.original = field::FockPair{n, m};
      c.reduced = sc ? FieldSpec{field::RhoNM{n, m}} : FieldSpec{field::EtaNM{n, m}};
      c.parameters = pair_text(n, m);
      break;
    case 3:
      c.original = field::EtaNM{n, m};
      c.reduced = sc ? FieldSpec{field::Fock{n}} : FieldSpec{field::FockPair{n, m}};
      c.parameters = pair_text(n, m);
      break;
    case 4:
      c = {field::Thermal{p1}, field::Thermal{p1}, "nbar=" + fmt(p1), false};
      break;
    case 5:
      if (sc) {
        // parameterized by the transformed amplitudes (alpha_c, beta_c)
        c.original = field::CoherentPair{h * (p1 + p2), h * (p1 - p2)};
        c.reduced = field::Coherent{p1};
        c.parameters = "alpha_c=" + fmt(p1) + ",beta_c=" + fmt(p2);
      } else {
        c.original = field::CoherentPair{p1, p2};
        c.reduced = field::CoherentPair{h * (p1 + p2), h * (p1 - p2)};
        c.parameters = "alpha=" + fmt(p1) + ",beta=" + fmt(p2);
      }
      break;
    case 6:
      c.original = field::SqueezedPair{p1};
      c.reduced = sc ? FieldSpec{field::Thermal{std::pow(std::sinh(p1), 2)}}
                     : FieldSpec{field::TwoModeSqueezed{-p1}};
      c.parameters = "xi=" + fmt(p1);
      break;
    case 7:
      c.original = field::TwoModeSqueezed{p1};
      c.reduced = sc ? FieldSpec{field::Squeezed{-p1}} : FieldSpec{field::SqueezedPair{-p1}};
      c.parameters = "xi=" + fmt(p1);
      break;
    default:
      throw std::invalid_argument("table1_instance: row must be 1..7");
  }
  return c;
}

namespace {

InstanceResult run_instance(const Table1Cell& cell, const CellInstance& inst, const TimeGrid& grid,
                            const ClassifyOptions& opt, const ScenarioTolerances& tol) {
  InstanceResult r;
  r.parameters = inst.parameters;
  r.footnote = inst.footnote;
  Scenario s;
  s.scheme = cell.scheme == Scheme::TMSC ? Scheme::SMSC : Scheme::DJC;
  s.atomic = cell.atomic;
  s.field = inst.reduced;
  s.grid = grid;
  try {
    const ScenarioOutcome o = classify_scenario(s, opt, tol);
    r.observed = o.cls.label;
    r.cutoff = o.cutoff;
    r.leakage = o.leakage;
    r.max_concurrence = o.max_concurrence;
    r.revives = o.cls.revives;
    r.low_confidence = o.cls.low_confidence;
  } catch (const TruncationError& e) {
    r.valid = false;
    r.error = e.what();
  }
  return r;
}

void grade(CellResult& c) {
  const CellExpectation& e = c.cell.expected;
  std::vector<EntanglementLabel> seen;
  bool ok = true;
  for (const auto& i : c.instances) {
    if (!i.valid) {
      c.valid = false;
      ok = false;
      continue;
    }
    if (i.footnote) {
      ok = ok && i.observed == EntanglementLabel::NONE;
      continue;
    }
    if (std::find(seen.begin(), seen.end(), i.observed) == seen.end()) seen.push_back(i.observed);
    ok = ok && std::find(e.labels.begin(), e.labels.end(), i.observed) != e.labels.end();
  }
  for (EntanglementLabel l : e.labels) {
    ok = ok && std::find(seen.begin(), seen.end(), l) != seen.end();
  }
  c.pass = ok && c.valid;
  std::string labels;
  for (EntanglementLabel l : seen) labels += (labels.empty() ? "" : "/") + to_string(l);
  if (!c.valid) c.observed = "INVALID";
  else if (e.generation) {
    const bool none = seen.size() == 1 && seen[0] == EntanglementLabel::NONE;
    c.observed = none ? "No" : "Yes, " + labels;
  } else {
    c.observed = labels;
  }
}

}  // namespace

std::vector<Table1Cell> table1_cells() {
  std::vector<Table1Cell> cells;
  for (Scheme scheme : {Scheme::TMSC, Scheme::TMAC}) {
    for (int row = 1; row <= 7; ++row) {
      for (int col = 0; col < 5; ++col) {
        std::string text = (scheme == Scheme::TMSC ? kTmsc : kTmac)[row - 1][col];
        const bool footnote = text.find('*') != std::string::npos;
        if (footnote) text.erase(text.find('*'), 1);
        Table1Cell c{scheme, row, kColumns[col], kColumnAtoms[col], parse_expectation(text),
                     row_instances(scheme, row, kColumns[col], footnote)};
        if (footnote) c.expected.text = (scheme == Scheme::TMSC ? kTmsc : kTmac)[row - 1][col];
        cells.push_back(std::move(c));
      }
    }
  }
  return cells;
}

bool Table1Report::all_valid() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.valid; });
}
bool Table1Report::all_pass() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.pass; });
}
std::size_t Table1Report::passed() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return c.pass; }));
}

Table1Report table1_harness(const std::vector<Table1Cell>& cells, const TimeGrid& grid, int threads,
                            const ClassifyOptions& opt, const ScenarioTolerances& tol) {
  grid.validate();
  struct Job {
    std::size_t cell, inst;
  };
  std::vector<Job> jobs;
  Table1Report rep;
  rep.window = {0.0, grid.t_max};
  for (std::size_t c = 0; c < cells.size(); ++c) {
    rep.cells.push_back({cells[c], std::vector<InstanceResult>(cells[c].instances.size()), true, false, ""});
    for (std::size_t i = 0; i < cells[c].instances.size(); ++i) jobs.push_back({c, i});
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      const Job j = jobs[k];
      try {
        rep.cells[j.cell].instances[j.inst] =
            run_instance(cells[j.cell], cells[j.cell].instances[j.inst], grid, opt, tol);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, threads);
  if (n == 1) worker();
  else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  for (auto& c : rep.cells) grade(c);
  return rep;
}

std::string table1_text(const Table1Report& rep) {
  std::ostringstream os;
  os << "window [" << rep.window.begin << ", " << rep.window.end << "] 1/g\n";
  for (const auto& c : rep.cells) {
    os << to_string(c.cell.scheme) << " row " << c.cell.row << " col " << c.cell.column << " ("
       << to_string(c.cell.atomic) << "): expected \"" << c.cell.expected.text << "\" observed \""
       << c.observed << "\" " << (c.pass ? "PASS" : (c.valid ? "FAIL" : "INVALID")) << '\n';
    for (const auto& i : c.instances) {
      os << "    " << i.parameters << (i.footnote ? " (n=m)" : "") << ": ";
      if (!i.valid) os << "INVALID " << i.error;
      else os << to_string(i.observed) << " cutoff=" << i.cutoff << " maxC=" << i.max_concurrence;
      os << '\n';
    }
  }
  os << rep.passed() << "/" << rep.cells.size() << " cells match\n";
  return os.str();
}

std::string table1_json(const Table1Report& rep) {
  nlohmann::ordered_json j;
  j["window"] = {rep.window.begin, rep.window.end};
  j["passed"] = rep.passed();
  j["total"] = rep.cells.size();
  auto& arr = j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : rep.cells) {
    nlohmann::ordered_json cj;
    cj["scheme"] = to_string(c.cell.scheme);
    cj["row"] = c.cell.row;
    cj["column"] = std::string(1, c.cell.column);
    cj["atoms"] = to_string(c.cell.atomic);
    cj["expected"] = c.cell.expected.text;
    cj["observed"] = c.observed;
    cj["status"] = c.pass ? "pass" : (c.valid ? "fail" : "invalid");
    auto& ia = cj["instances"] = nlohmann::ordered_json::array();
    for (const auto& i : c.instances) {
      nlohmann::ordered_json ij;
      ij["parameters"] = i.parameters;
      ij["footnote"] = i.footnote;
      ij["valid"] = i.valid;
      if (i.valid) {
        ij["label"] = to_string(i.observed);
        ij["cutoff"] = i.cutoff;
        ij["leakage"] = i.leakage;
        ij["max_concurrence"] = i.max_concurrence;
        ij["revives"] = i.revives;
      } else {
        ij["error"] = i.error;
      }
      ia.push_back(std::move(ij));
    }
    arr.push_back(std::move(cj));
  }
  return j.dump(2);
}

}  // namespace twomode
