// Truncated Fock-space and qubit tensor algebra.
//
// Conventions used project-wide:
//  * atoms use the ordered basis (e, g), so two atoms read {|ee>,|eg>,|ge>,|gg>};
//  * field modes use ascending Fock index 0..cutoff-1;
//  * composite indices are row-major over the layout (first subsystem is slowest).
#pragma once

#include "twomode/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace twomode {

/// Validation tolerances applied to constructed states.
struct Tolerances {
  static constexpr double hermitian = 1e-12;
  static constexpr double trace = 1e-10;
  static constexpr double psd = 1e-10;
  static constexpr double norm = 1e-12;
};

/// Ordered list of subsystem dimensions with unique labels.
class SpaceLayout {
 public:
  SpaceLayout() = default;
  SpaceLayout(std::vector<int> dims, std::vector<std::string> labels);

  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return dims_.size(); }
  Index total_dim() const { return total_; }

  bool contains(std::string_view label) const;
  /// Position of `label` in the layout; throws std::invalid_argument for unknown labels.
  std::size_t position(std::string_view label) const;
  int dim(std::string_view label) const { return dims_[position(label)]; }
  Index stride(std::size_t pos) const { return strides_[pos]; }

  std::vector<int> decode(Index index) const;
  Index encode(std::span<const int> digits) const;
  int digit(Index index, std::size_t pos) const {
    return static_cast<int>((index / strides_[pos]) % dims_[pos]);
  }

  /// Sub-layout holding `keep` in this layout's relative order.
  SpaceLayout subset(const std::vector<std::string>& keep) const;
  /// Concatenation (this first).
  SpaceLayout concat(const SpaceLayout& other) const;

  bool operator==(const SpaceLayout& other) const {
    return dims_ == other.dims_ && labels_ == other.labels_;
  }

  std::string describe() const;

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
  std::vector<Index> strides_;
  Index total_ = 1;
};

/// Square complex matrix over a layout.
struct Operator {
  SpaceLayout layout;
  Matrix matrix;

  Operator() = default;
  Operator(SpaceLayout layout_, Matrix matrix_);
};

/// Unit-norm vector over a layout.
class StateVector {
 public:
  StateVector() = default;
  /// Throws std::invalid_argument if the size mismatches or the norm is off by more than `tol`.
  StateVector(SpaceLayout layout, Vector vector, double tol = 1e-10);
  /// Normalizes `vector` (which must be nonzero).
  static StateVector normalized(SpaceLayout layout, Vector vector);

  const SpaceLayout& layout() const { return layout_; }
  const Vector& vector() const { return vector_; }

 private:
  SpaceLayout layout_;
  Vector vector_;
};

/// Hermitian, unit-trace matrix over a layout. Construction validates Hermiticity and trace
/// and stores the exactly-Hermitian part; positivity is checked on demand (`check_psd`).
class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(SpaceLayout layout, Matrix matrix);
  static DensityMatrix pure(const StateVector& psi);

  const SpaceLayout& layout() const { return layout_; }
  const Matrix& matrix() const { return matrix_; }

  double purity() const;
  RealVector eigenvalues() const;
  /// Throws NumericalError if an eigenvalue is below -tol.
  void check_psd(double tol = Tolerances::psd) const;

 private:
  SpaceLayout layout_;
  Matrix matrix_;
};

/// Convex decomposition rho = sum_k w_k |psi_k><psi_k|; the workhorse representation for
/// evolving mixed states one pure component at a time.
struct Ensemble {
  SpaceLayout layout;
  std::vector<double> weights;
  std::vector<Vector> states;

  static Ensemble pure(const StateVector& psi);
  /// Eigen-decomposition; components with weight below `drop` are discarded and the
  /// remaining weights renormalized.
  static Ensemble from_density(const DensityMatrix& rho, double drop = 1e-15);

  bool is_pure() const { return states.size() == 1; }
  std::size_t size() const { return states.size(); }
  DensityMatrix to_density() const;
};

/// Tensor product of two ensembles (layouts concatenated, a first).
Ensemble tensor(const Ensemble& a, const Ensemble& b);

// ---- single-subsystem operators -------------------------------------------------------

/// Truncated ladder operator: <n-1|a|n> = sqrt(n). Throws for cutoff < 2.
Operator annihilation(int cutoff);
Operator creation(int cutoff);
Operator number_operator(int cutoff);
/// |e> -> |g> in the (e, g) basis.
Operator sigma_minus();
Operator sigma_plus();

Matrix kron(const Matrix& a, const Matrix& b);
Operator identity(const SpaceLayout& layout);

/// Kronecker product of `op` (acting on one subsystem) with identities elsewhere.
Operator embed(const Matrix& op, const SpaceLayout& layout, std::string_view which);
Operator embed(const Operator& op, const SpaceLayout& layout, std::string_view which);

// ---- partial operations ----------------------------------------------------------------

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);
/// Reduced state of a pure vector, computed without forming the full projector.
DensityMatrix partial_trace(const StateVector& psi, const std::vector<std::string>& keep);
/// Same as above on a raw vector; the result is unnormalized (trace = |psi|^2).
Matrix reduce_pure(const Vector& psi, const SpaceLayout& layout,
                   const std::vector<std::string>& keep);

/// <j,k|rho^{T_B}|l,q> = <j,q|rho|l,k> for the subsystem(s) named.
Operator partial_transpose(const DensityMatrix& rho, std::string_view subsystem);
Operator partial_transpose(const DensityMatrix& rho, const std::vector<std::string>& subsystems);
Matrix partial_transpose(const Matrix& m, const SpaceLayout& layout, std::size_t pos);

/// Reorders the subsystems of `psi`; `order` must be a permutation of the layout labels.
StateVector permute_subsystems(const StateVector& psi, const std::vector<std::string>& order);

double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_distance(const Matrix& a, const Matrix& b);
/// <psi|rho|psi> for pure reference states.
double fidelity(const StateVector& psi, const DensityMatrix& rho);

}  // namespace twomode
