// Qualitative labels of concurrence trajectories, thresholds and the Table I harness.
#pragma once

#include "twomode/dynamics.hpp"
#include "twomode/entanglement.hpp"
#include "twomode/states.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twomode {

enum class EntanglementLabel { NONE, SD, DI, AL };

std::string to_string(EntanglementLabel l);
EntanglementLabel parse_label(std::string_view s);

struct Interval {
  double begin;
  double end;
  double length() const { return end - begin; }
};

/// Bracket located while refining a zero of the concurrence.
struct Refinement {
  enum class Kind { DeadEdge, Minimum } kind;
  double t_lo;
  double t_hi;
  double value;  // concurrence at the best point found
};

struct EntanglementSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<Refinement> refinements;

  void validate() const;
};

struct ClassifyOptions {
  double tau_zero = kZeroConcurrence;
  double delta_dead = 0.01;
  /// Sampled local minima below this fraction of the series maximum are refined.
  double minimum_fraction = 0.05;
  std::size_t min_samples = 500;
};

struct EntanglementClass {
  EntanglementLabel label = EntanglementLabel::NONE;
  std::vector<Interval> dead_intervals;  // sorted, disjoint
  std::vector<double> touch_points;
  std::optional<double> first_life;
  /// Concurrence becomes nonzero again after a dead interval.
  bool revives = false;
  /// No callback was available, so zero regions were not refined.
  bool low_confidence = false;
  Interval window{0.0, 0.0};
  /// Smallest concurrence seen after first life (refined where possible).
  double min_after_life = 0.0;
};

using ConcurrenceFn = std::function<double(double)>;

/// Labels a series: NONE if it never exceeds tau_zero; otherwise SD when a zero region of
/// length >= delta_dead follows first life, DI when every such zero is an isolated touch,
/// AL when there is none. With a callback, zero regions are refined by bisection and
/// sampled minima by golden-section search; the verdict holds on the sampled window only.
EntanglementClass classify_series(EntanglementSeries& series, const ClassifyOptions& opt = {},
                                  const ConcurrenceFn& callback = nullptr);

/// Concurrence series of an engine on a grid together with its callback.
EntanglementSeries concurrence_series(const ReducedDynamics& engine, const TimeGrid& grid);
ConcurrenceFn concurrence_callback(const ReducedDynamics& engine);

class AmbiguousThresholdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThresholdResult {
  double value;
  double lo;
  double hi;
  EntanglementLabel below;
  EntanglementLabel above;
  std::vector<std::pair<double, EntanglementLabel>> samples;
};

/// Parameter at which the label changes. The range is sampled at `samples` (>= 8) points;
/// exactly one change is required, otherwise AmbiguousThresholdError lists the labels.
ThresholdResult find_threshold(const std::function<EntanglementLabel(double)>& label_at,
                               double lo, double hi, int samples = 8, double width = 1e-3);

// ---- scenarios -------------------------------------------------------------------------

struct Scenario {
  Scheme scheme = Scheme::TMSC;
  AtomicLabel atomic = AtomicLabel::PHI;
  FieldSpec field = field::Vacuum{};
  double g = 1.0;
  int cutoff = 0;  // 0: automatic
  std::optional<int> excitation_cap;
  TimeGrid grid;
  double phi = 0.0;
  Backend backend = Backend::Auto;
};

struct ScenarioTolerances {
  double tau_tail = 1e-10;
  double tau_leak = kDefaultLeakTolerance;
  /// Leak tolerance used when choosing a cutoff automatically.
  double tau_leak_cutoff = 1e-10;
};

/// Scenario that is actually evolved: with Backend::Auto, TMSC and TMAC scenarios whose field
/// has a closed-form image become SMSC and DJC scenarios of that image.
Scenario evolved_scenario(const Scenario& s);
/// Cutoff chosen for a scenario (its own value if set).
int scenario_cutoff(const Scenario& s, const ScenarioTolerances& tol = {});
ModelConfig scenario_config(const Scenario& s, const ScenarioTolerances& tol = {});
/// Engine for evolved_scenario(s); throws TruncationError when the leakage exceeds tol.tau_leak.
std::unique_ptr<ReducedDynamics> scenario_dynamics(const Scenario& s,
                                                   const ScenarioTolerances& tol = {});

struct ScenarioOutcome {
  EntanglementClass cls;
  int cutoff = 0;
  double leakage = 0.0;
  double max_concurrence = 0.0;
};

ScenarioOutcome classify_scenario(const Scenario& s, const ClassifyOptions& opt = {},
                                  const ScenarioTolerances& tol = {});

// ---- Table I ---------------------------------------------------------------------------

/// Expected entry of one table cell.
struct CellExpectation {
  /// For columns A-C: whether entanglement is generated ("Yes"/"No"); empty for D, E.
  std::optional<bool> generation;
  /// Allowed labels; with two entries both must occur among the instances.
  std::vector<EntanglementLabel> labels;
  std::string text;  // as printed in the table
};

struct CellInstance {
  FieldSpec original;  // state of the original two modes
  FieldSpec reduced;   // its image in the SMSC / DJC model, which is what gets evolved
  std::string parameters;
  /// Instance of the footnote "no entanglement for n = m": expected NONE.
  bool footnote = false;
};

struct Table1Cell {
  Scheme scheme;
  int row;      // 1..7
  char column;  // 'A'..'E'
  AtomicLabel atomic;
  CellExpectation expected;
  std::vector<CellInstance> instances;
};

struct InstanceResult {
  std::string parameters;
  bool footnote = false;
  EntanglementLabel observed = EntanglementLabel::NONE;
  bool valid = true;
  std::string error;
  int cutoff = 0;
  double leakage = 0.0;
  double max_concurrence = 0.0;
  bool revives = false;
  bool low_confidence = false;
};

struct CellResult {
  Table1Cell cell;
  std::vector<InstanceResult> instances;
  bool valid = true;
  bool pass = false;
  std::string observed;  // e.g. "Yes, SD/DI"
};

struct Table1Report {
  std::vector<CellResult> cells;
  Interval window;
  bool all_valid() const;
  bool all_pass() const;
  std::size_t passed() const;
};

/// Instance of a table row: Fock rows take (n, m) = (p1, p2), thermal rows nbar = p1,
/// squeezed rows xi = p1, coherent rows (alpha_c, beta_c) for TMSC and (alpha, beta) for TMAC.
CellInstance table1_instance(Scheme scheme, int row, double p1 = 0.0, double p2 = 0.0);
/// The 70 cells with their documented default instances.
std::vector<Table1Cell> table1_cells();
/// Runs the cells (optionally restricted to one scheme) on `threads` workers.
Table1Report table1_harness(const std::vector<Table1Cell>& cells, const TimeGrid& grid = {},
                            int threads = 1, const ClassifyOptions& opt = {},
                            const ScenarioTolerances& tol = {});
std::string table1_text(const Table1Report& report);
/// JSON text of the report (see README for the schema).
std::string table1_json(const Table1Report& report);

}  // namespace twomode
