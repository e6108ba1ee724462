// Two-qubit concurrence, entanglement of formation, negativity.
#pragma once

#include "twomode/hilbert.hpp"

#include <string>
#include <vector>

namespace twomode {

/// Concurrence below this value counts as zero.
inline constexpr double kZeroConcurrence = 1e-9;

enum class Measure { Concurrence, EoF, Negativity };

std::string to_string(Measure m);

struct MeasureResult {
  double value = 0.0;
  Measure measure = Measure::Concurrence;
  std::string bipartition;
};

/// Wootters concurrence of a two-qubit state, from the singular values of W^T (sy x sy) W
/// where rho = W W^dag (the square roots of the eigenvalues of rho rho~). Eigenvalues of
/// rho in (-tau_psd, 1e-13) are treated as zero; below -tau_psd NumericalError is thrown.
double concurrence(const Matrix& rho);
double concurrence(const DensityMatrix& rho);
/// Same quantity from a general eigensolve of rho rho~ (imaginary parts above 1e-10 and
/// eigenvalues below -tau_psd raise NumericalError).
double concurrence_eigen(const Matrix& rho);

/// h((1 + sqrt(1 - C^2)) / 2) with the binary entropy h in bits.
double eof(double c);

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose over `part`
/// (= (||rho^T||_1 - 1)/2). `part` must be a nonempty proper subset of the layout labels.
double negativity(const DensityMatrix& rho, const std::vector<std::string>& part);
/// Two-qubit negativity across atom1 | atom2.
double negativity_atoms(const Matrix& rho);

MeasureResult measure(const DensityMatrix& rho, Measure m,
                      const std::vector<std::string>& part = {});

struct SmallSqueezingNegativities {
  double atoms;
  double fields;
};

/// Lowest-order negativities for |ee> with a weakly two-mode squeezed field in the double
/// Jaynes-Cummings model:
///   N_atoms  = |min(s1^2 c1^2 - xi s1^2 c2^2, 0)|,
///   N_fields = |min(s1^2 c1^2 - xi c1^2 c2^2, 0)|,
/// s1 = sin(sqrt2 gt), c1 = cos(sqrt2 gt), c2 = cos(2gt).
SmallSqueezingNegativities small_squeezing_negativities(double xi, double gt);

}  // namespace twomode
