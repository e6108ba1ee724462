#include "doctest.h"
#include "oracles.hpp"

#include "twomode/dynamics.hpp"
#include "twomode/entanglement.hpp"

#include <cmath>

using namespace twomode;

namespace {

ModelConfig config(Scheme s, int cutoff, double phi = 0.0) {
  ModelConfig c;
  c.scheme = s;
  c.cutoff = cutoff;
  c.phi = phi;
  return c;
}

double unitarity_error(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("Hamiltonians are Hermitian and conserve excitations") {
  for (const auto& cfg : {config(Scheme::TMSC, 4), config(Scheme::TMAC, 4),
                          config(Scheme::GeneralPhi, 4, 1.1), config(Scheme::SMSC, 6),
                          config(Scheme::DJC, 4)}) {
    const Operator h = model_hamiltonian(cfg);
    CHECK((h.matrix - h.matrix.adjoint()).norm() == 0.0);
    const Matrix n = excitation_operator(h.layout).matrix;
    CHECK((h.matrix * n - n * h.matrix).norm() < 1e-13);
  }
}

TEST_CASE("two-mode Hamiltonian matrix elements") {
  const ModelConfig cfg = config(Scheme::GeneralPhi, 3, 0.9);
  const Operator h = model_hamiltonian(cfg);
  const SpaceLayout& l = h.layout;
  auto idx = [&](int a1, int a2, int n1, int n2) { return l.encode(std::vector<int>{a1, a2, n1, n2}); };
  // atom basis (e, g): e = 0, g = 1
  CHECK(std::abs(h.matrix(idx(0, 1, 0, 0), idx(1, 1, 1, 0)) - 1.0) < 1e-15);
  CHECK(std::abs(h.matrix(idx(1, 0, 0, 0), idx(1, 1, 0, 1)) - std::polar(1.0, 0.9)) < 1e-15);
  CHECK(std::abs(h.matrix(idx(1, 0, 0, 1), idx(1, 1, 0, 2)) - std::polar(std::sqrt(2.0), 0.9)) < 1e-14);
}

TEST_CASE("block-exact propagator matches dense exponentiation") {
  for (const auto& cfg : {config(Scheme::TMSC, 4), config(Scheme::TMAC, 4),
                          config(Scheme::GeneralPhi, 4, 2.3), config(Scheme::SMSC, 8),
                          config(Scheme::DJC, 4)}) {
    const Operator h = model_hamiltonian(cfg);
    const BlockSpectralPropagator p(h);
    for (double t : {0.0, 0.37, 2.5, 11.0}) {
      const Matrix u = p.at(t).matrix;
      CHECK((u - oracle::expm(h.matrix, t)).cwiseAbs().maxCoeff() < 1e-11);
      CHECK(unitarity_error(u) < 1e-10);
    }
  }
}

TEST_CASE("closed-form propagators match dense exponentiation on the exact blocks") {
  // columns whose excitation number stays below the truncation edge
  auto low_columns = [](const SpaceLayout& l, int limit) {
    const auto ex = excitation_numbers(l);
    std::vector<Index> cols;
    for (Index i = 0; i < l.total_dim(); ++i)
      if (ex[i] <= limit) cols.push_back(i);
    return cols;
  };
  auto max_error = [](const Matrix& a, const Matrix& b, const std::vector<Index>& cols) {
    double e = 0.0;
    for (Index c : cols) e = std::max(e, (a.col(c) - b.col(c)).cwiseAbs().maxCoeff());
    return e;
  };
  const int d = 8;
  for (double t : {0.0, 0.21, 1.7, 6.0, 25.0}) {
    const Operator hs = smsc_hamiltonian(1.0, d);
    const Operator us = propagator_smsc_closed(t, 1.0, d);
    const auto cs = low_columns(hs.layout, d - 1);
    CHECK(max_error(us.matrix, oracle::expm(hs.matrix, t), cs) < 1e-11);

    const Operator hd = djc_hamiltonian(0.7, 5);
    const Operator ud = propagator_djc_closed(t, 0.7, 5);
    // per-mode excitation of each atom-mode pair stays below the cutoff
    std::vector<Index> cd;
    for (Index i = 0; i < hd.layout.total_dim(); ++i) {
      const auto dg = hd.layout.decode(i);
      if (dg[2] + (dg[0] == 0) <= 4 && dg[3] + (dg[1] == 0) <= 4) cd.push_back(i);
    }
    CHECK(max_error(ud.matrix, oracle::expm(hd.matrix, t), cd) < 1e-11);
  }
}

TEST_CASE("analytic single-excitation trajectories") {
  ModelConfig cfg = config(Scheme::SMSC, 6);
  SUBCASE("|eg>|0>: C = sin^2(2gt)/2") {
    const SystemState s = assemble_initial(AtomicLabel::EG, field::Vacuum{}, cfg);
    const auto e = make_engine(cfg, s);
    for (double t = 0.0; t < 6.0; t += 0.31) {
      CHECK(concurrence(e->atomic(t)) == doctest::Approx(0.5 * std::pow(std::sin(2 * t), 2)).epsilon(1e-12));
    }
  }
  SUBCASE("|gg>|1>: C = sin^2(2gt)") {
    const SystemState s = assemble_initial(AtomicLabel::GG, field::Fock{1}, cfg);
    const auto e = make_engine(cfg, s);
    for (double t = 0.0; t < 6.0; t += 0.29) {
      CHECK(concurrence(e->atomic(t)) == doctest::Approx(std::pow(std::sin(2 * t), 2)).epsilon(1e-12));
    }
  }
  SUBCASE("DJC |ee>|00>: each atom decays as cos^2(sqrt2 g t)") {
    ModelConfig c = config(Scheme::DJC, 4);
    const SystemState s = assemble_initial(AtomicLabel::EE, field::Vacuum{}, c);
    const auto e = make_engine(c, s);
    for (double t = 0.0; t < 5.0; t += 0.23) {
      const double p = std::pow(std::cos(std::sqrt(2.0) * t), 2);
      CHECK(e->atomic(t)(0, 0).real() == doctest::Approx(p * p).epsilon(1e-12));
    }
  }
}

TEST_CASE("engines agree across backends") {
  const ModelConfig tmsc = config(Scheme::TMSC, 10);
  const SystemState s = assemble_initial(AtomicLabel::PSI, field::CoherentPair{0.6, 0.2}, tmsc);
  const auto fast = make_dynamics(tmsc, s, Backend::Auto);
  const auto exact = make_dynamics(tmsc, s, Backend::BlockExact);
  CHECK(fast->backend() == Backend::SmscClosed);
  for (double t : {0.0, 1.3, 7.7, 19.0}) {
    CHECK(trace_distance(fast->atomic(t), exact->atomic(t)) < 1e-8);
  }
  const ModelConfig tmac = config(Scheme::TMAC, 8);
  const SystemState s2 = assemble_initial(AtomicLabel::EG, field::FockPair{1, 0}, tmac);
  const auto f2 = make_dynamics(tmac, s2, Backend::Auto);
  const auto e2 = make_dynamics(tmac, s2, Backend::BlockExact);
  CHECK(f2->backend() == Backend::DjcClosed);
  for (double t : {0.4, 3.3, 12.0}) CHECK(trace_distance(f2->atomic(t), e2->atomic(t)) < 1e-10);
}

TEST_CASE("trace is preserved and leakage is flagged") {
  const ModelConfig cfg = config(Scheme::SMSC, 40);
  const SystemState s = assemble_initial(AtomicLabel::PHI, field::Thermal{1.0}, cfg, 1e-8);
  const auto e = make_engine(cfg, s);
  for (double t : {0.0, 2.0, 9.0}) CHECK(std::abs(e->atomic(t).trace().real() - 1.0) < 1e-10);
  CHECK(e->leakage() < 1e-6);

  ModelConfig small = config(Scheme::SMSC, 12);
  const SystemState s2 = assemble_initial(AtomicLabel::EE, field::Coherent{1.6}, small, 1e-3);
  CHECK(leakage_population(s2, 12) > 1e-6);
  CHECK_THROWS_AS(evolve_reduced(s2, small), TruncationError);
}
