// Model configuration shared by the states, dynamics and mappings modules.
#pragma once

#include "twomode/hilbert.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twomode {

/// Coupling scheme. TMSC/TMAC/GeneralPhi are the two-mode model in the original field
/// modes (separation phase 0, pi, or arbitrary); SMSC and DJC are the equivalent reduced
/// models written directly in the transformed modes.
enum class Scheme { TMSC, TMAC, GeneralPhi, SMSC, DJC };

std::string to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

struct TimeGrid {
  double t_max = 25.0;  // units of 1/g
  int samples = 2001;

  std::vector<double> times() const;
  void validate() const;
};

struct ModelConfig {
  Scheme scheme = Scheme::TMSC;
  double phi = 0.0;  // used by GeneralPhi only, radians in [0, 2pi)
  double g = 1.0;
  int cutoff = 12;  // per field mode
  /// Highest total excitation number treated as exact; defaults to cutoff - 1. Leakage is
  /// measured against it.
  std::optional<int> excitation_cap;
  TimeGrid grid;

  double phase() const;
  int field_modes() const { return scheme == Scheme::SMSC ? 1 : 2; }
  std::vector<std::string> field_labels() const;
  SpaceLayout layout() const;
  int cap() const { return excitation_cap.value_or(cutoff - 1); }
  void validate() const;
};

inline const std::vector<std::string> kAtomLabels{"atom1", "atom2"};

/// Total excitation number (excited atoms + photons) of every basis index of `layout`.
/// Subsystems whose label starts with "atom" are qubits in the (e, g) basis.
std::vector<int> excitation_numbers(const SpaceLayout& layout);

}  // namespace twomode
