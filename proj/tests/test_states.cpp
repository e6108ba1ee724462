#include "doctest.h"
#include "oracles.hpp"

#include "twomode/mappings.hpp"
#include "twomode/states.hpp"

#include <cmath>

using namespace twomode;

namespace {

Vector fock(int n, int d) {
  Vector v = Vector::Zero(d);
  v(n) = 1.0;
  return v;
}

Vector fock2(int n, int m, int d) {
  Vector v = Vector::Zero(d * d);
  v(n * d + m) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("atomic states") {
  const Vector phi = atomic_state(AtomicLabel::PHI).vector();
  const Vector psi = atomic_state(AtomicLabel::PSI).vector();
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(phi(0) - h) < 1e-15);
  CHECK(std::abs(phi(3) - h) < 1e-15);
  CHECK(std::abs(psi(1) - h) < 1e-15);
  CHECK(std::abs(psi(2) - h) < 1e-15);
  CHECK(atomic_state(AtomicLabel::EG).vector()(1) == cplx(1.0));
  CHECK(atomic_state(AtomicLabel::GG).vector()(3) == cplx(1.0));
  CHECK(parse_atomic_label("PSI") == AtomicLabel::PSI);
  CHECK_THROWS_AS(parse_atomic_label("XX"), std::invalid_argument);
}

TEST_CASE("coherent state equals displaced vacuum") {
  const cplx alpha(0.8, -0.3);
  const int big = 50;
  const Matrix a = annihilation(big).matrix;
  const Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  const Vector ref = gen.exp() * fock(0, big);
  const Vector v = coherent_state(alpha, 20).vector();
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  CHECK((v - ref.head(20)).norm() < 1e-9);
}

TEST_CASE("single-mode squeezed vacuum") {
  const int big = 80;
  const Matrix a = annihilation(big).matrix;
  for (const cplx xi : {cplx(0.5, 0.0), cplx(0.3, 0.4), cplx(-0.7, 0.1)}) {
    const Matrix ad = a.adjoint();
    const Matrix gen = 0.5 * (xi * ad * ad - std::conj(xi) * a * a);
    const Vector ref = gen.exp() * fock(0, big);
    const Vector v = squeezed_vacuum(xi, 40).vector();
    CHECK((v - ref.head(40)).norm() < 1e-8);
    for (int n = 1; n < 40; n += 2) CHECK(v(n) == cplx(0.0));
  }
  SUBCASE("mean photon number sinh^2 r") {
    const Vector v = squeezed_vacuum(0.5, 60).vector();
    double mean = 0.0;
    for (int n = 0; n < 60; ++n) mean += n * std::norm(v(n));
    CHECK(mean == doctest::Approx(std::pow(std::sinh(0.5), 2)).epsilon(1e-10));
    CHECK(std::abs(mean - 0.2715) < 1e-4);
  }
  CHECK((squeezed_vacuum(0.0, 8).vector() - fock(0, 8)).norm() == 0.0);
}

TEST_CASE("two-mode squeezed vacuum") {
  const double r = 0.8;
  const StateVector s = two_mode_squeezed_vacuum(r, 40, 1e-8);
  const Vector& v = s.vector();
  const int d = 40;
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m)
      if (n != m) CHECK(v(n * d + m) == cplx(0.0));
  for (int n = 1; n <= 5; ++n) {
    const double ratio = std::abs(v(n * d + n) / v((n - 1) * d + n - 1));
    CHECK(ratio == doctest::Approx(std::tanh(r)).epsilon(1e-10));
  }
  SUBCASE("exponentiated generator oracle") {
    const int k = 22;
    const Matrix a1 = kron(annihilation(k).matrix, Matrix::Identity(k, k));
    const Matrix a2 = kron(Matrix::Identity(k, k), annihilation(k).matrix);
    const cplx xi = std::polar(0.4, 0.7);
    const Matrix gen = std::conj(xi) * a1 * a2 - xi * a1.adjoint() * a2.adjoint();
    const Vector ref = gen.exp() * fock2(0, 0, k);
    const Vector w = two_mode_squeezed_vacuum(xi, k, 1e-8).vector();
    for (int n = 0; n <= 5; ++n) CHECK(std::abs(w(n * k + n) - ref(n * k + n)) < 1e-10);
  }
  SUBCASE("reduced mode is thermal with nbar sinh^2 r") {
    const DensityMatrix red = partial_trace(s, {"F1"});
    const DensityMatrix th = thermal_state(std::pow(std::sinh(r), 2), d, 1e-6);
    CHECK(trace_distance(red.matrix(), th.matrix()) < 1e-6);
  }
}

TEST_CASE("thermal state weights") {
  const DensityMatrix t = thermal_state(1.0, 60);
  for (int n = 0; n < 10; ++n) CHECK(t.matrix()(n, n).real() == doctest::Approx(std::pow(0.5, n + 1)));
  double mean = 0.0;
  for (int n = 0; n < 60; ++n) mean += n * t.matrix()(n, n).real();
  CHECK(std::abs(mean - 1.0) < 1e-8);
  const DensityMatrix v = thermal_state(0.0, 5);
  CHECK(v.matrix()(0, 0) == cplx(1.0));
  CHECK((v.matrix().array().abs().sum()) == doctest::Approx(1.0));
}

TEST_CASE("truncation is reported, not hidden") {
  try {
    coherent_state(3.0, 8);
    FAIL("expected TruncationError");
  } catch (const TruncationError& e) {
    CHECK(e.required_cutoff() > 8);
    CHECK_NOTHROW(coherent_state(3.0, e.required_cutoff()));
  }
  CHECK_THROWS_AS(thermal_state(2.0, 10), TruncationError);
  CHECK_THROWS_AS(squeezed_vacuum(1.5, 10), TruncationError);
  CHECK_THROWS_AS(fock_state(5, 5), std::exception);
}

TEST_CASE("analytic tails") {
  double s = 0.0;
  for (int n = 0; n < 10; ++n) s += std::pow(0.3, n) / std::pow(1.3, n + 1);
  CHECK(thermal_tail(0.3, 10) == doctest::Approx(1.0 - s).epsilon(1e-8));
  double p = 0.0;
  for (int n = 0; n < 6; ++n) p += std::exp(-2.0) * std::pow(2.0, n) / std::tgamma(n + 1.0);
  CHECK(coherent_tail(2.0, 6) == doctest::Approx(1.0 - p).epsilon(1e-10));
  CHECK(two_mode_squeezed_tail(0.5, 12) ==
        doctest::Approx(thermal_tail(std::pow(std::sinh(0.5), 2), 12)).epsilon(1e-12));
}

TEST_CASE("eta_nm closed form") {
  CHECK((eta_nm(0, 0, 4).vector() - fock2(0, 0, 4)).norm() < 1e-15);
  SUBCASE("eta_11 = (|20> - |02>)/sqrt2") {
    const Vector e = eta_nm(1, 1, 4).vector();
    Vector ref = (fock2(2, 0, 4) - fock2(0, 2, 4)) / std::sqrt(2.0);
    CHECK((e - ref).norm() < 1e-14);
  }
  SUBCASE("unit norm before renormalization") {
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m) CHECK(std::abs(eta_nm_raw(n, m, n + m + 1).norm() - 1.0) < 1e-10);
  }
  SUBCASE("agrees with the beamsplitter unitary") {
    const int d = 8;
    const ModeTransform u = mode_transform_unitary(d);
    for (int n = 0; n <= 3; ++n)
      for (int m = 0; m <= 3; ++m)
        CHECK((eta_nm(n, m, d).vector() - u.apply(fock2(n, m, d))).norm() < 1e-10);
  }
  CHECK_THROWS(eta_nm(2, 2, 4));
}

TEST_CASE("rho_nm") {
  CHECK((rho_nm(0, 0, 3).matrix() - Matrix(fock(0, 3) * fock(0, 3).adjoint())).norm() < 1e-15);
  const Matrix r11 = rho_nm(1, 1, 4).matrix();
  Matrix ref = Matrix::Zero(4, 4);
  ref(0, 0) = ref(2, 2) = 0.5;
  CHECK((r11 - ref).norm() < 1e-14);
  for (int n = 0; n <= 3; ++n) {
    for (int m = 0; m <= 3; ++m) {
      const int d = n + m + 1;
      const Matrix r = rho_nm(n, m, d).matrix();
      CHECK((r - Matrix(r.diagonal().asDiagonal())).norm() < 1e-14);
      const Matrix brute = oracle::partial_trace(
          Matrix(eta_nm(n, m, d).vector() * eta_nm(n, m, d).vector().adjoint()), {d, d}, {true, false});
      CHECK((r - brute).norm() < 1e-14);
    }
  }
}

TEST_CASE("assembled initial states") {
  ModelConfig cfg;
  cfg.scheme = Scheme::TMSC;
  cfg.cutoff = 14;
  {
    const SystemState s = assemble_initial(AtomicLabel::EE, field::Vacuum{}, cfg);
    const auto full = to_full_state(s);
    REQUIRE(std::holds_alternative<StateVector>(full));
    const Vector& v = std::get<StateVector>(full).vector();
    CHECK(v(0) == cplx(1.0));
    CHECK(std::abs(v.norm() - 1.0) < 1e-15);
  }
  {
    const SystemState s = assemble_initial(AtomicLabel::PHI, field::Thermal{0.3}, cfg);
    const auto full = to_full_state(s);
    REQUIRE(std::holds_alternative<DensityMatrix>(full));
    const Matrix& m = std::get<DensityMatrix>(full).matrix();
    CHECK(std::abs(m.trace().real() - 1.0) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    int rank = 0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) rank += es.eigenvalues()(i) > 1e-12;
    CHECK(rank < m.rows());
  }
  {
    const SystemState s = assemble_initial(AtomicLabel::PSI, field::FockPair{1, 0}, cfg);
    const auto full = to_full_state(s);
    REQUIRE(std::holds_alternative<StateVector>(full));
  }
  CHECK_THROWS(assemble_initial(AtomicLabel::EE, field::Fock{1}, cfg));
}

TEST_CASE("constructors are deterministic") {
  const Vector a = two_mode_squeezed_vacuum(cplx(0.4, 0.2), 20).vector();
  const Vector b = two_mode_squeezed_vacuum(cplx(0.4, 0.2), 20).vector();
  CHECK(a == b);
  CHECK(coherent_state(1.1, 20).vector() == coherent_state(1.1, 20).vector());
}

TEST_CASE("auto cutoff bounds the tail") {
  const int d = auto_cutoff(field::Thermal{0.5}, 2, 1e-10, 1e-10);
  CHECK(thermal_tail(0.5, d) < 1e-10);
  CHECK(auto_cutoff(field::Vacuum{}, 2, 1e-10, 1e-10, 6) == 6);
}
