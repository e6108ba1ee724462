// Shared scalar/matrix aliases and error types.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace twomode {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when a Fock cutoff is too small to hold a state to the requested tail tolerance.
/// `required_cutoff()` is the smallest cutoff that would have passed (0 when unknown).
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, int required_cutoff)
      : std::runtime_error(what), required_(required_cutoff) {}
  int required_cutoff() const noexcept { return required_; }

 private:
  int required_;
};

/// Numerical checks that failed (non-Hermitian input, negative eigenvalues beyond tolerance, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twomode
