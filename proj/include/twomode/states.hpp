// Initial atomic and field states.
#pragma once

#include "twomode/hilbert.hpp"
#include "twomode/model.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace twomode {

enum class AtomicLabel { GG, EE, EG, GE, PHI, PSI };

std::string to_string(AtomicLabel a);
AtomicLabel parse_atomic_label(std::string_view s);

/// Two-qubit state on (atom1, atom2) in the basis {|ee>,|eg>,|ge>,|gg>}.
/// PHI = (|ee>+|gg>)/sqrt2, PSI = (|eg>+|ge>)/sqrt2.
StateVector atomic_state(AtomicLabel label);

inline constexpr double kDefaultTailTolerance = 1e-8;
inline constexpr double kDefaultLeakTolerance = 1e-6;

// ---- single-mode and two-mode constructors ---------------------------------------------
//
// Constructors holding an infinite photon distribution check the analytic tail mass beyond
// the cutoff against `tau_tail` and throw TruncationError (naming the cutoff that would
// suffice) instead of silently renormalizing a poorly truncated state.

StateVector fock_state(int n, int cutoff, std::string label = "mode");
StateVector coherent_state(cplx alpha, int cutoff, double tau_tail = kDefaultTailTolerance,
                           std::string label = "mode");
/// exp((xi a^dag^2 - xi* a^2)/2)|0>; <n> = sinh^2|xi|, odd amplitudes exactly zero.
StateVector squeezed_vacuum(cplx xi, int cutoff, double tau_tail = kDefaultTailTolerance,
                            std::string label = "mode");
/// exp(xi* a1 a2 - xi a1^dag a2^dag)|00>, obtained by exponentiating the generator.
StateVector two_mode_squeezed_vacuum(cplx xi, int cutoff,
                                     double tau_tail = kDefaultTailTolerance,
                                     std::vector<std::string> labels = {"F1", "F2"});
DensityMatrix thermal_state(double nbar, int cutoff, double tau_tail = kDefaultTailTolerance,
                            std::string label = "mode");

/// Image of |n,m> under the mode transform, evaluated from the closed-form double sum.
StateVector eta_nm(int n, int m, int cutoff, std::vector<std::string> labels = {"TF1", "TF2"});
/// The closed-form sum without renormalization (its norm is 1 when the formula is right).
Vector eta_nm_raw(int n, int m, int cutoff);
/// Tr_TF2 |eta_nm><eta_nm|.
DensityMatrix rho_nm(int n, int m, int cutoff, std::string label = "TF1");

// ---- analytic tail masses  sum_{n >= cutoff} p_n ---------------------------------------

double coherent_tail(double mean_photons, int cutoff);
double squeezed_tail(double r, int cutoff);
double thermal_tail(double nbar, int cutoff);
/// Per-mode tail of the two-mode squeezed vacuum (= thermal tail with nbar = sinh^2 r).
double two_mode_squeezed_tail(double r, int cutoff);

// ---- field specifications --------------------------------------------------------------

namespace field {
struct Vacuum {};
struct Fock { int n = 0; };
struct FockPair { int n = 0, m = 0; };
struct Coherent { cplx alpha{}; };
struct CoherentPair { cplx alpha{}, beta{}; };
struct Squeezed { cplx xi{}; };
/// |xi, -xi>: mode 1 squeezed by xi, mode 2 by -xi.
struct SqueezedPair { cplx xi{}; };
struct TwoModeSqueezed { cplx xi{}; };
/// Thermal state with mean photon number nbar in every mode.
struct Thermal { double nbar = 0.0; };
struct EtaNM { int n = 0, m = 0; };
struct RhoNM { int n = 0, m = 0; };
}  // namespace field

using FieldSpec = std::variant<field::Vacuum, field::Fock, field::FockPair, field::Coherent,
                               field::CoherentPair, field::Squeezed, field::SqueezedPair,
                               field::TwoModeSqueezed, field::Thermal, field::EtaNM,
                               field::RhoNM>;

/// Number of field modes the spec describes: 1, 2, or 0 when it fits either.
int field_modes(const FieldSpec& spec);
std::string describe(const FieldSpec& spec);
void validate(const FieldSpec& spec);

/// Distribution of the TOTAL photon number, P(N = k) for k <= nmax, for a field with the
/// given number of modes.
std::vector<double> photon_number_distribution(const FieldSpec& spec, int modes, int nmax);
/// Photon-number distribution of each mode separately, P(n_q = k) for k <= nmax.
std::vector<std::vector<double>> mode_number_distributions(const FieldSpec& spec, int modes,
                                                           int nmax);
/// Largest single-mode tail mass beyond `cutoff`.
double per_mode_tail(const FieldSpec& spec, int modes, int cutoff);

/// Which excitation number the dynamics conserves: the total one, or one per atom-mode
/// pair (the double Jaynes-Cummings model).
enum class BlockStructure { Total, PerMode };

/// Smallest cutoff >= min_cutoff keeping every per-mode tail below tau_tail and the
/// photon population that could reach the top two exact excitation blocks below
/// tau_leak / 10.
int auto_cutoff(const FieldSpec& spec, int modes, double tau_tail = kDefaultTailTolerance,
                double tau_leak = kDefaultLeakTolerance, int min_cutoff = 4,
                BlockStructure blocks = BlockStructure::Total);

/// Field state, kept in product form when the modes are uncorrelated.
class FieldState {
 public:
  FieldState() = default;
  static FieldState product(std::vector<Ensemble> factors, bool number_invariant = false);
  static FieldState joint(Ensemble ensemble, bool number_invariant = false);

  bool is_product() const { return !factors_.empty(); }
  const std::vector<Ensemble>& factors() const { return factors_; }
  /// Decomposition of the joint state (tensor product of the factors for product states).
  Ensemble ensemble() const;
  SpaceLayout layout() const;
  bool is_pure() const;
  /// True when the state is a function of the total photon number alone, so that every
  /// number-conserving passive transform leaves it unchanged.
  bool number_invariant() const { return number_invariant_; }
  DensityMatrix density() const;
  FieldState relabeled(const std::vector<std::string>& labels) const;

 private:
  std::vector<Ensemble> factors_;
  std::optional<Ensemble> joint_;
  bool number_invariant_ = false;
};

FieldState make_field(const FieldSpec& spec, const std::vector<std::string>& labels, int cutoff,
                      double tau_tail = kDefaultTailTolerance);

/// Pure atoms times a field state.
struct SystemState {
  Vector atoms;  // 4 amplitudes on (atom1, atom2)
  FieldState field;

  SpaceLayout layout() const;
  /// Decomposition of the full state on layout().
  Ensemble ensemble() const;
};

SystemState assemble_initial(AtomicLabel atomic, const FieldSpec& spec, const ModelConfig& cfg,
                             double tau_tail = kDefaultTailTolerance);
/// Dense full-space form: a StateVector when pure, otherwise a DensityMatrix.
std::variant<StateVector, DensityMatrix> to_full_state(const SystemState& s);

}  // namespace twomode
