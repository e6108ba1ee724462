// Mode transformation A1 = (a1+a2)/sqrt2, A2 = (a1-a2)/sqrt2 and the model-equivalence maps.
#pragma once

#include "twomode/dynamics.hpp"
#include "twomode/hilbert.hpp"
#include "twomode/states.hpp"

#include <optional>
#include <vector>

namespace twomode {

/// Hadamard beamsplitter on two modes of equal cutoff: a pi/4 rotation composed with a pi
/// phase on mode 2, stored as one unitary block per total photon number. Blocks with total
/// number <= cutoff-1 are exact; higher blocks are truncated but remain unitary.
class ModeTransform {
 public:
  /// With `flip_sign`, the pi phase is omitted, so the second transformed mode is
  /// (a2 - a1)/sqrt2 instead.
  explicit ModeTransform(int cutoff, bool flip_sign = false);

  int cutoff() const { return cutoff_; }
  bool flipped() const { return flip_; }
  /// Acts on a two-mode vector in row-major (mode1, mode2) order.
  Vector apply(const Vector& v) const;
  Vector apply_adjoint(const Vector& v) const;
  Matrix dense() const;
  Operator unitary(const std::vector<std::string>& labels = {"F1", "F2"}) const;
  /// max |(U a1 U^dag - (a1+a2)/sqrt2)_{ij}| and the same for a2 over the exact blocks.
  double conjugation_error() const;

 private:
  struct Block {
    std::vector<Index> indices;
    Matrix u;
  };
  int cutoff_;
  bool flip_;
  std::vector<Block> blocks_;  // indexed by total photon number
};

/// Throws NumericalError when the conjugation invariant fails by more than 1e-10.
ModeTransform mode_transform_unitary(int cutoff, bool flip_sign = false);

/// Mode transform followed by the trace over TF2.
DensityMatrix tmsc_to_smsc(const StateVector& field, bool flip_sign = false);
DensityMatrix tmsc_to_smsc(const DensityMatrix& field, bool flip_sign = false);
/// Mode transform only.
StateVector tmac_to_djc(const StateVector& field, bool flip_sign = false);
DensityMatrix tmac_to_djc(const DensityMatrix& field, bool flip_sign = false);

/// Same maps on decomposed field states (labels TF1 / TF1, TF2). Number-invariant states
/// are passed through unchanged apart from relabeling.
FieldState tmsc_to_smsc(const FieldState& field, bool flip_sign = false);
FieldState tmac_to_djc(const FieldState& field, bool flip_sign = false);

/// Closed-form image of a two-mode field spec: the TF1 state for TMSC, the (TF1, TF2) state
/// for TMAC. Empty when the spec is not a two-mode spec or the scheme is neither.
std::optional<FieldSpec> mapped_field(const FieldSpec& original, Scheme scheme);

struct EquivalenceReport {
  double max_trace_distance = 0.0;
  int cutoff = 0;
  double leakage = 0.0;
};

/// Evolves the two-mode model block-exactly and the mapped reduced model with its closed
/// form, returning the largest atomic trace distance over the grid. cutoff 0 selects the
/// cutoff automatically. Throws TruncationError when either side leaks beyond tau_leak.
EquivalenceReport verify_equivalence(AtomicLabel atomic, const FieldSpec& field, Scheme scheme,
                                     const TimeGrid& grid, int cutoff = 0, double g = 1.0,
                                     double tau_leak = kDefaultLeakTolerance);

}  // namespace twomode
