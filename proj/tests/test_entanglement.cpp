#include "doctest.h"
#include "oracles.hpp"

#include "twomode/entanglement.hpp"

#include <cmath>

using namespace twomode;

namespace {

Matrix projector(const Vector& v) { return v * v.adjoint(); }

Matrix werner(double p) {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return p * projector(phi) + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
}

}  // namespace

TEST_CASE("concurrence of reference states") {
  Vector bell = Vector::Zero(4);
  bell(1) = 1.0 / std::sqrt(2.0);
  bell(2) = cplx(0.0, 1.0) / std::sqrt(2.0);
  CHECK(concurrence(projector(bell)) == doctest::Approx(1.0).epsilon(1e-14));
  Vector prod = Vector::Zero(4);
  prod(0) = 1.0;
  CHECK(concurrence(projector(prod)) == 0.0);
  CHECK(concurrence(Matrix(Matrix::Identity(4, 4) / 4.0)) == 0.0);
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    CHECK(concurrence(werner(p)) == doctest::Approx(std::max(0.0, (3 * p - 1) / 2)).epsilon(1e-12));
    CHECK(negativity_atoms(werner(p)) == doctest::Approx(std::max(0.0, (3 * p - 1) / 4)).epsilon(1e-12));
  }
}

TEST_CASE("pure-state concurrence matches 2|ad - bc|") {
  std::mt19937 rng(5);
  for (int k = 0; k < 200; ++k) {
    const Vector v = oracle::random_state(4, rng);
    CHECK(concurrence(projector(v)) == doctest::Approx(oracle::pure_concurrence(v)).epsilon(1e-12));
  }
}

TEST_CASE("singular-value route agrees with the eigenvalue route") {
  std::mt19937 rng(9);
  for (int rank = 1; rank <= 4; ++rank) {
    for (int k = 0; k < 100; ++k) {
      const Matrix rho = oracle::random_density(4, rank, rng);
      CHECK(std::abs(concurrence(rho) - concurrence_eigen(rho)) < 1e-7);
    }
  }
}

TEST_CASE("PPT iff zero concurrence") {
  std::mt19937 rng(21);
  int entangled = 0;
  for (int k = 0; k < 400; ++k) {
    const Matrix rho = oracle::random_density(4, 1 + k % 4, rng);
    const double c = concurrence(rho);
    const double n = negativity_atoms(rho);
    CHECK((c > 1e-9) == (n > 1e-12));
    entangled += c > 1e-9;
  }
  CHECK(entangled > 50);
}

TEST_CASE("entanglement of formation") {
  CHECK(eof(0.0) == 0.0);
  CHECK(eof(1.0) == doctest::Approx(1.0));
  double last = 0.0;
  for (double c = 0.05; c <= 1.0; c += 0.05) {
    const double e = eof(c);
    CHECK(e > last);
    last = e;
  }
  const double x = (1.0 + std::sqrt(1.0 - 0.25)) / 2.0;
  CHECK(eof(0.5) == doctest::Approx(-x * std::log2(x) - (1 - x) * std::log2(1 - x)));
}

TEST_CASE("negativity across larger bipartitions") {
  std::mt19937 rng(2);
  const SpaceLayout l({2, 2, 3}, {"atom1", "atom2", "TF1"});
  const Vector a = oracle::random_state(4, rng);
  const Vector f = oracle::random_state(3, rng);
  const Vector v = kron(a, f);
  const DensityMatrix rho = DensityMatrix::pure(StateVector(l, v));
  CHECK(negativity(rho, {"TF1"}) < 1e-12);
  const double n = negativity(rho, {"atom1"});
  CHECK(n == doctest::Approx(oracle::pure_concurrence(a) / 2).epsilon(1e-10));
  CHECK_THROWS_AS(negativity(rho, {}), std::invalid_argument);
}

TEST_CASE("invalid inputs are rejected") {
  Matrix bad = Matrix::Identity(4, 4) / 4.0;
  bad(0, 0) = -0.01;
  bad(1, 1) = 0.26 + 0.01;
  CHECK_THROWS_AS(concurrence(bad), NumericalError);
  CHECK_THROWS(concurrence(Matrix(Matrix::Identity(3, 3))));
}

TEST_CASE("small-squeezing closed forms") {
  for (double gt : {0.0, 0.4, 1.1, 2.9}) {
    const double xi = 0.02;
    const double s1 = std::sin(std::sqrt(2.0) * gt), c1 = std::cos(std::sqrt(2.0) * gt),
                 c2 = std::cos(2 * gt);
    const auto n = small_squeezing_negativities(xi, gt);
    CHECK(n.atoms == doctest::Approx(std::abs(std::min(s1 * s1 * c1 * c1 - xi * s1 * s1 * c2 * c2, 0.0))));
    CHECK(n.fields == doctest::Approx(std::abs(std::min(s1 * s1 * c1 * c1 - xi * c1 * c1 * c2 * c2, 0.0))));
  }
}
