// Run configuration (JSON) and the command implementations behind the command-line tool.
#pragma once

#include "twomode/classify.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace twomode {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitConfig = 2, kExitTruncation = 3 };

/// The one parameter of a config replaced by {"sweep": ...}; `parameter` is its JSON path
/// such as "g" or "field.nbar" or "field.xi.re".
struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct RunConfig {
  Scheme scheme = Scheme::TMSC;
  double phi = 0.0;
  double g = 1.0;
  AtomicLabel atomic = AtomicLabel::PHI;
  FieldSpec field = field::Vacuum{};
  /// Per-mode cutoffs: empty for automatic, one value for every mode, or one per mode.
  std::vector<int> cutoffs;
  std::optional<int> excitation_cap;
  Backend backend = Backend::Auto;
  TimeGrid grid;
  ClassifyOptions classify;
  ScenarioTolerances tolerances;
  /// Columns recorded by `simulate`: concurrence, eof, negativity_atoms, negativity_fields.
  std::vector<std::string> measures{"concurrence", "eof", "negativity_atoms"};
  double verify_bound = 1e-8;
  std::optional<SweepSpec> sweep;
  std::optional<std::string> csv_path;
  std::optional<std::string> json_path;

  /// Throws TruncationError when the per-mode cutoffs differ.
  Scenario scenario() const;
};

inline const std::vector<std::string> kMeasureNames{"concurrence", "eof", "negativity_atoms",
                                                    "negativity_fields"};

/// Parses JSON text; throws ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
/// JSON with every default written out.
std::string serialize_run_config(const RunConfig& cfg);

/// Shortest round-trip-safe text with 17 significant digits, independent of the locale.
std::string format_double(double x);

struct CliOptions {
  std::string config_path;
  std::optional<std::string> out_path;
  bool json = false;
  std::optional<Scheme> only;  // table1: TMSC or TMAC
  int threads = 1;
};

int cmd_simulate(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& opt, std::ostream& out, std::ostream& err);
int cmd_table1(const CliOptions& opt, std::ostream& out, std::ostream& err);

/// Series written by `simulate`.
struct SimulationResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Absent when the grid is shorter than ClassifyOptions::min_samples.
  std::optional<EntanglementClass> classification;
  int cutoff = 0;
  double leakage = 0.0;
};

SimulationResult simulate(const RunConfig& cfg);
std::string to_csv(const SimulationResult& r);

/// Row of `sweep`: summary of one parameter value.
struct SweepRow {
  double value = 0.0;
  bool valid = true;  // false when the point failed a truncation or numerical check
  std::string error;
  EntanglementLabel label = EntanglementLabel::NONE;
  std::optional<double> first_life;
  double min_after_life = 0.0;
  double max_concurrence = 0.0;
  bool revives = false;
  int cutoff = 0;
};

std::vector<SweepRow> sweep(const RunConfig& cfg, int threads = 1);
std::string to_csv(const std::vector<SweepRow>& rows, const std::string& parameter);

}  // namespace twomode
