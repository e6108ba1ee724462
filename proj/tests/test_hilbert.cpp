#include "doctest.h"
#include "oracles.hpp"

#include "twomode/fock_op.hpp"
#include "twomode/hilbert.hpp"

using namespace twomode;

TEST_CASE("layout encodes row-major digits") {
  const SpaceLayout l({2, 3, 4}, {"a", "b", "c"});
  CHECK(l.total_dim() == 24);
  for (Index i = 0; i < l.total_dim(); ++i) {
    const auto d = l.decode(i);
    CHECK(d[0] * 12 + d[1] * 4 + d[2] == i);
    CHECK(l.encode(d) == i);
  }
  CHECK_THROWS_AS(l.position("x"), std::invalid_argument);
}

TEST_CASE("partial trace agrees with index-loop oracle") {
  std::mt19937 rng(7);
  const SpaceLayout l({2, 2, 3, 3}, {"atom1", "atom2", "F1", "F2"});
  const Matrix m = oracle::random_density(36, 5, rng);
  const DensityMatrix rho(l, m);
  const std::vector<std::vector<std::string>> keeps{
      {"atom1", "atom2"}, {"F1", "F2"}, {"atom2", "F1"}, {"atom1"}, {"F2"}};
  for (const auto& keep : keeps) {
    std::vector<bool> mask;
    for (const auto& lab : l.labels())
      mask.push_back(std::find(keep.begin(), keep.end(), lab) != keep.end());
    const Matrix ref = oracle::partial_trace(m, l.dims(), mask);
    CHECK((partial_trace(rho, keep).matrix() - ref).norm() < 1e-13);
  }
}

TEST_CASE("pure-state partial trace matches the density-matrix route") {
  std::mt19937 rng(11);
  const SpaceLayout l({2, 2, 4}, {"atom1", "atom2", "TF1"});
  const Vector v = oracle::random_state(16, rng);
  const StateVector psi(l, v);
  const DensityMatrix full = DensityMatrix::pure(psi);
  for (const std::vector<std::string>& keep :
       {std::vector<std::string>{"atom1", "atom2"}, {"TF1"}, {"atom2", "TF1"}}) {
    CHECK((partial_trace(psi, keep).matrix() - partial_trace(full, keep).matrix()).norm() < 1e-13);
  }
}

TEST_CASE("partial transpose on a Bell state") {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const SpaceLayout l({2, 2}, {"atom1", "atom2"});
  const DensityMatrix rho = DensityMatrix::pure(StateVector(l, bell));
  const Operator pt = partial_transpose(rho, "atom2");
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = expect(3, 3) = expect(1, 2) = expect(2, 1) = 0.5;
  CHECK((pt.matrix - expect).norm() < 1e-15);
  Eigen::SelfAdjointEigenSolver<Matrix> es(pt.matrix);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("ladder operators") {
  const int d = 6;
  const Matrix a = annihilation(d).matrix;
  const Matrix ad = creation(d).matrix;
  CHECK((ad - a.adjoint()).norm() == 0.0);
  const Matrix comm = a * ad - ad * a;
  for (int n = 0; n < d - 1; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
  CHECK(((ad * a) - number_operator(d).matrix).norm() < 1e-14);
  const Matrix sm = sigma_minus().matrix;
  CHECK(sm(1, 0) == cplx(1.0));  // |e> -> |g>
  CHECK(sm.cwiseAbs().sum() == 1.0);
}

TEST_CASE("FockOp arithmetic matches dense matrices") {
  const int d = 7;
  const FockOp a = FockOp::lower(d);
  const FockOp ad = FockOp::raise(d);
  const FockOp f = FockOp::diagonal(d, [](int n) { return std::cos(0.3 * n); });
  const Matrix da = annihilation(d).matrix;
  const Matrix dad = creation(d).matrix;
  const Matrix df = f.dense();
  CHECK(((ad * f * a).dense() - dad * df * da).norm() < 1e-14);
  CHECK(((a * ad + f).dense() - (da * dad + df)).norm() < 1e-14);
  std::mt19937 rng(3);
  const Vector v = oracle::random_state(d, rng);
  CHECK(((f * a).apply(v) - df * da * v).norm() < 1e-14);
}

TEST_CASE("trace distance and fidelity") {
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
  const SpaceLayout l({2}, {"atom1"});
  Vector e = Vector::Zero(2);
  e(0) = 1.0;
  CHECK(fidelity(StateVector(l, e), DensityMatrix(l, a)) == doctest::Approx(1.0));
}
