// Hamiltonians, propagators and evolution engines.
#pragma once

#include "twomode/fock_op.hpp"
#include "twomode/hilbert.hpp"
#include "twomode/model.hpp"
#include "twomode/states.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <optional>
#include <vector>

namespace twomode {

// ---- Hamiltonians (interaction picture, hbar = 1) --------------------------------------

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Phases removable by redefining the atomic and field references.
struct Gauge {
  double uniform = 0.0;  // every coupling times e^{i uniform}
  double mode2 = 0.0;    // couplings to the second mode times e^{i mode2}
};

/// g[s1+ a1 + s1+ a2 + s2+ a1 + e^{i phi} s2+ a2] + h.c. on (atom1, atom2, F1, F2).
Operator interaction_hamiltonian(const ModelConfig& cfg, Gauge gauge = {});
/// sqrt2 g [(s1+ + s2+) A1 + h.c.] on (atom1, atom2, TF1).
Operator smsc_hamiltonian(double g, int cutoff);
/// sqrt2 g [s1+ A1 + s2+ A2 + h.c.] on (atom1, atom2, TF1, TF2).
Operator djc_hamiltonian(double g, int cutoff);
/// Hamiltonian of `cfg` on cfg.layout().
Operator model_hamiltonian(const ModelConfig& cfg, Gauge gauge = {});
/// Same, without forming the dense matrix.
SparseMatrix model_hamiltonian_sparse(const ModelConfig& cfg, Gauge gauge = {});

/// Total excitation number operator (diagonal) on a layout.
Operator excitation_operator(const SpaceLayout& layout);

// ---- block-exact propagator ------------------------------------------------------------

/// exp(-iHt) from Hermitian eigendecompositions of the excitation-number blocks of H.
class BlockSpectralPropagator {
 public:
  /// Throws NumericalError if H is not Hermitian or couples different excitation blocks
  /// (both checked at 1e-12).
  explicit BlockSpectralPropagator(const Operator& hamiltonian);
  BlockSpectralPropagator(const SpaceLayout& layout, const SparseMatrix& hamiltonian);

  const SpaceLayout& layout() const { return layout_; }
  std::size_t blocks() const { return blocks_.size(); }
  Operator at(double t) const;
  Vector apply(const Vector& psi, double t) const;
  /// Coordinates of psi in the eigenbasis (per block), for repeated evolution.
  std::vector<Vector> project(const Vector& psi) const;
  Vector evolve_projected(const std::vector<Vector>& coords, double t) const;

 private:
  struct Block {
    std::vector<Index> indices;
    Matrix vectors;
    RealVector energies;
  };
  SpaceLayout layout_;
  std::vector<Block> blocks_;
};

Operator propagator_block_exact(const Operator& hamiltonian, double t);

// ---- closed forms ----------------------------------------------------------------------

/// One operator-valued entry of an atomic-block propagator: factor * op.
struct BlockEntry {
  cplx factor;
  FockOp op;
};

/// Square matrix of block entries indexed by atomic basis states.
struct AtomBlocks {
  int size = 0;
  std::vector<BlockEntry> entries;  // row-major

  const BlockEntry& operator()(int row, int col) const { return entries[row * size + col]; }
  /// Dense matrix on (atoms, mode) with the atomic index slowest.
  Matrix dense() const;
};

/// Blocks of the single-mode propagator in the atomic basis {ee, eg, ge, gg}.
AtomBlocks smsc_blocks(double t, double g, int cutoff);
/// Blocks of one Jaynes-Cummings factor U_i (atom i with mode TF_i) in the basis (e, g).
AtomBlocks djc_blocks(double t, double g, int cutoff);

/// Dense closed-form propagator on (atom1, atom2, TF1).
Operator propagator_smsc_closed(double t, double g, int cutoff);
/// Dense closed-form U1 (x) U2 arranged on (atom1, atom2, TF1, TF2).
Operator propagator_djc_closed(double t, double g, int cutoff);

// ---- evolution engines -----------------------------------------------------------------

enum class Backend { Auto, SmscClosed, DjcClosed, BlockExact };

std::string to_string(Backend b);
Backend parse_backend(std::string_view s);

/// Reduced dynamics of one scenario: the atomic state at arbitrary times.
class ReducedDynamics {
 public:
  virtual ~ReducedDynamics() = default;
  /// Atomic density matrix (4x4 on atom1, atom2) at time t.
  virtual Matrix atomic(double t) const = 0;
  /// Reduced state of the two field modes, when the engine keeps them (empty otherwise).
  virtual std::optional<DensityMatrix> field(double t) const {
    (void)t;
    return std::nullopt;
  }
  /// Population in the two highest exact excitation blocks and above. The dynamics
  /// conserves it, so it is a property of the initial state.
  virtual double leakage() const = 0;
  virtual Backend backend() const = 0;
};

/// Engine for a state already expressed on the layout of `cfg` (scheme SMSC, DJC, or any
/// two-mode scheme with the block-exact backend).
std::unique_ptr<ReducedDynamics> make_engine(const ModelConfig& cfg, const SystemState& initial,
                                             Backend backend = Backend::Auto,
                                             Gauge gauge = {});

/// Engine for a scenario in any scheme. With Backend::Auto, TMSC and TMAC initial states
/// are mapped to the SMSC and DJC models and evolved with their closed forms; other
/// phases use block-exact exponentiation of the two-mode Hamiltonian.
std::unique_ptr<ReducedDynamics> make_dynamics(const ModelConfig& cfg, const SystemState& initial,
                                               Backend backend = Backend::Auto);

/// Distribution of the total photon number of a field state.
std::vector<double> photon_distribution(const FieldState& field);
/// Population of the initial state with total excitation number >= cutoff - 2.
double leakage_population(const SystemState& s, int cutoff);

struct AtomicSample {
  double t;
  DensityMatrix rho;
};

/// Atomic trajectory over the grid of cfg. Throws TruncationError when the leakage
/// exceeds `tau_leak`.
std::vector<AtomicSample> evolve_reduced(const SystemState& initial, const ModelConfig& cfg,
                                         Backend backend = Backend::Auto,
                                         double tau_leak = kDefaultLeakTolerance);

}  // namespace twomode
