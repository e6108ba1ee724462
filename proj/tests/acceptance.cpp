// Acceptance run: one PASS/FAIL line per criterion.
#include "twomode/classify.hpp"
#include "twomode/dynamics.hpp"
#include "twomode/entanglement.hpp"
#include "twomode/mappings.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace twomode;

namespace {

const double kPi = std::acos(-1.0);

// Accumulated over every trajectory evaluated in this run.
struct Hygiene {
  double trace_error = 0.0;
  double leakage = 0.0;
  long samples = 0;
  long ppt_violations = 0;
  double worst_ppt_gap = 0.0;

  void leak(double l) { leakage = std::max(leakage, l); }

  void sample(const Matrix& rho) {
    ++samples;
    trace_error = std::max(trace_error, std::abs(rho.trace() - 1.0));
    const double c = concurrence(rho);
    const double n = negativity_atoms(rho);
    // two-qubit bounds: (sqrt((1-C)^2 + C^2) - (1-C))/2 <= N <= C/2
    const double lower = 0.5 * (std::hypot(1.0 - c, c) - (1.0 - c));
    const double gap = std::max(n - 0.5 * c, lower - n);
    worst_ppt_gap = std::max(worst_ppt_gap, gap);
    // C clearly nonzero must come with a negative partial-transpose eigenvalue
    if (gap > 1e-12 || (c > 1e-6 && n <= 0.0)) ++ppt_violations;
  }
} hygiene;

ModelConfig model(Scheme s, int cutoff, double t_max = 25.0, int samples = 2001) {
  ModelConfig c;
  c.scheme = s;
  c.cutoff = cutoff;
  c.grid.t_max = t_max;
  c.grid.samples = samples;
  return c;
}

std::vector<Matrix> trajectory(const ReducedDynamics& e, const TimeGrid& grid) {
  hygiene.leak(e.leakage());
  std::vector<Matrix> out;
  for (double t : grid.times()) {
    out.push_back(e.atomic(t));
    hygiene.sample(out.back());
  }
  return out;
}

std::vector<double> concurrences(const std::vector<Matrix>& traj) {
  std::vector<double> c;
  for (const Matrix& r : traj) c.push_back(concurrence(r));
  return c;
}

Vector random_atoms(std::mt19937& rng) {
  std::normal_distribution<double> n;
  Vector v(4);
  for (int i = 0; i < 4; ++i) v(i) = cplx(n(rng), n(rng));
  return v / v.norm();
}

Vector product_atoms(cplx a1, cplx b1, cplx a2, cplx b2) {
  Vector v(4);
  v << a1 * a2, a1 * b2, b1 * a2, b1 * b2;  // (e, g) per atom
  return v / v.norm();
}

// keeps the edge population, and so the trace loss of the closed forms, below 1e-11
int cutoff_for(const FieldSpec& f, int modes) {
  return auto_cutoff(f, modes, kDefaultTailTolerance, 1e-10);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// 1 -------------------------------------------------------------------------------------

Outcome backend_equivalence() {
  const int d = 12;
  std::mt19937 rng(7);
  const std::vector<FieldSpec> fields{field::Vacuum{},          field::FockPair{1, 0},
                                      field::FockPair{2, 1},    field::CoherentPair{0.3, cplx(0, 0.2)},
                                      field::SqueezedPair{0.1}, field::TwoModeSqueezed{cplx(0.1, 0.05)},
                                      field::Thermal{0.1}};
  double worst = 0.0;
  for (Scheme s : {Scheme::TMSC, Scheme::TMAC}) {
    const ModelConfig cfg = model(s, d);
    for (const FieldSpec& f : fields) {
      for (int k = 0; k < 3; ++k) {
        SystemState init = assemble_initial(AtomicLabel::EE, f, cfg);
        init.atoms = random_atoms(rng);
        const auto fast = make_dynamics(cfg, init, Backend::Auto);
        const auto exact = make_dynamics(cfg, init, Backend::BlockExact);
        const auto a = trajectory(*fast, cfg.grid);
        const auto b = trajectory(*exact, cfg.grid);
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, trace_distance(a[i], b[i]));
      }
    }
  }
  return {worst < 1e-8, "max trace distance " + fmt(worst)};
}

// 2 -------------------------------------------------------------------------------------

Outcome mapping_equivalence() {
  const std::vector<FieldSpec> fields{field::CoherentPair{0.8, 0.3}, field::SqueezedPair{0.5},
                                      field::FockPair{1, 0}};
  TimeGrid grid;
  double worst = 0.0;
  int cutoff = 0;
  for (Scheme s : {Scheme::TMSC, Scheme::TMAC}) {
    for (const FieldSpec& f : fields) {
      for (AtomicLabel a : {AtomicLabel::EE, AtomicLabel::EG, AtomicLabel::GG, AtomicLabel::PHI,
                            AtomicLabel::PSI}) {
        const EquivalenceReport r = verify_equivalence(a, f, s, grid);
        worst = std::max(worst, r.max_trace_distance);
        cutoff = std::max(cutoff, r.cutoff);
        hygiene.leak(r.leakage);
      }
    }
  }
  return {worst < 1e-8, "max trace distance " + fmt(worst) + ", cutoff <= " + std::to_string(cutoff)};
}

// 3 -------------------------------------------------------------------------------------

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Outcome table_one() {
  const Table1Report rep = table1_harness(table1_cells(), {}, workers());
  std::string failed;
  for (const CellResult& c : rep.cells) {
    for (const InstanceResult& i : c.instances) hygiene.leak(i.leakage);
    if (c.pass) continue;
    failed += (failed.empty() ? "" : " ") + to_string(c.cell.scheme) + "-" +
              std::to_string(c.cell.row) + c.cell.column;
  }
  return {rep.all_pass() && rep.all_valid(),
          std::to_string(rep.passed()) + "/" + std::to_string(rep.cells.size()) + " cells" +
              (failed.empty() ? "" : "; mismatched " + failed)};
}

// 4 -------------------------------------------------------------------------------------

Outcome thermal_threshold() {
  const auto label = [](double nbar) {
    Scenario s;
    s.scheme = Scheme::TMSC;
    s.atomic = AtomicLabel::PHI;
    s.field = field::Thermal{nbar};
    const ScenarioOutcome o = classify_scenario(s);
    hygiene.leak(o.leakage);
    return o.cls.label;
  };
  try {
    const ThresholdResult r = find_threshold(label, 0.0, 1.0, 8, 1e-3);
    const bool ok = r.below == EntanglementLabel::AL && r.above == EntanglementLabel::SD &&
                    std::abs(r.value - 0.43) <= 0.02;
    return {ok, "nbar_crit = " + fmt(r.value) + " (" + to_string(r.below) + " -> " +
                    to_string(r.above) + ")"};
  } catch (const AmbiguousThresholdError& e) {
    return {false, e.what()};
  }
}

// 5 -------------------------------------------------------------------------------------

// Field state projected on {|00>, |01>, |10>, |11>} and renormalized.
DensityMatrix lowest_block(const DensityMatrix& f) {
  const int d = f.layout().dims()[0];
  Matrix p(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) p(a, b) = f.matrix()((a / 2) * d + a % 2, (b / 2) * d + b % 2);
  return DensityMatrix(SpaceLayout({2, 2}, {"TF1", "TF2"}), p / p.trace());
}

Outcome small_squeezing() {
  const double xi = 0.02;
  ModelConfig cfg = model(Scheme::DJC, 12, 2 * kPi, 1001);
  const SystemState init = assemble_initial(AtomicLabel::EE, field::TwoModeSqueezed{xi}, cfg, 1e-12);
  const auto e = make_engine(cfg, init);
  hygiene.leak(e->leakage());
  double worst = 0.0;
  std::vector<double> na, nf;
  for (double t : cfg.grid.times()) {
    const Matrix rho = e->atomic(t);
    hygiene.sample(rho);
    na.push_back(negativity_atoms(rho));
    const DensityMatrix f = *e->field(t);
    nf.push_back(negativity(f, {"TF1"}));
    const SmallSqueezingNegativities ref = small_squeezing_negativities(xi, t);
    worst = std::max({worst, std::abs(na.back() - ref.atoms),
                      std::abs(negativity(lowest_block(f), {"TF1"}) - ref.fields)});
  }
  // transfer: the full field negativity falls while the atomic one grows
  int transfer = 0;
  for (std::size_t i = 1; i < na.size(); ++i) {
    if (na[i] - na[i - 1] > 1e-7 && nf[i] - nf[i - 1] < -1e-7) ++transfer;
  }
  return {worst < 5e-3 && transfer > 0,
          "max deviation " + fmt(worst) + ", transfer samples " + std::to_string(transfer) +
              ", peak N_atoms " + fmt(*std::max_element(na.begin(), na.end()))};
}

// 6 -------------------------------------------------------------------------------------

Outcome squeezed_thermal() {
  const double r = 0.5;
  const double nbar = std::pow(std::sinh(r), 2);
  double worst = 0.0;
  const int d = cutoff_for(field::SqueezedPair{r}, 2);
  for (AtomicLabel a : {AtomicLabel::EE, AtomicLabel::EG, AtomicLabel::GG, AtomicLabel::PHI,
                        AtomicLabel::PSI}) {
    const ModelConfig cfg = model(Scheme::TMSC, d);
    const auto sq = make_dynamics(cfg, assemble_initial(a, field::SqueezedPair{r}, cfg),
                                  Backend::BlockExact);
    const auto th = make_dynamics(cfg, assemble_initial(a, field::Thermal{nbar}, cfg));
    const auto c1 = concurrences(trajectory(*sq, cfg.grid));
    const auto c2 = concurrences(trajectory(*th, cfg.grid));
    for (std::size_t i = 0; i < c1.size(); ++i) worst = std::max(worst, std::abs(c1[i] - c2[i]));
  }
  return {worst < 1e-6, "max |dC| " + fmt(worst) + " at cutoff " + std::to_string(d)};
}

// 7 -------------------------------------------------------------------------------------

Outcome no_generation() {
  double fock_diag = 0.0;
  for (const FieldSpec& f : std::vector<FieldSpec>{field::Vacuum{}, field::Fock{1}, field::Fock{3},
                                                   field::Thermal{0.3}, field::Thermal{1.0},
                                                   field::RhoNM{1, 0}, field::RhoNM{2, 1}}) {
    const ModelConfig smsc = model(Scheme::SMSC, cutoff_for(f, 1));
    const auto e = make_engine(smsc, assemble_initial(AtomicLabel::EE, f, smsc));
    for (double c : concurrences(trajectory(*e, smsc.grid))) fock_diag = std::max(fock_diag, c);
  }
  double eta = 0.0;
  const ModelConfig djc = model(Scheme::DJC, 8);
  std::vector<Vector> atoms{product_atoms(1, 0, 1, 0), product_atoms(1, 0, 0, 1),
                            product_atoms(0, 1, 1, 0), product_atoms(0, 1, 0, 1)};
  for (int n : {1, 2}) {
    for (const Vector& v : atoms) {
      SystemState init = assemble_initial(AtomicLabel::EE, field::EtaNM{n, n}, djc);
      init.atoms = v;
      const auto e = make_engine(djc, init);
      for (double c : concurrences(trajectory(*e, djc.grid))) eta = std::max(eta, c);
    }
  }
  return {fock_diag < 1e-12 && eta < 1e-10,
          "EE with Fock-diagonal fields max C " + fmt(fock_diag) + ", separable with eta_nn max C " +
              fmt(eta)};
}

// 8 -------------------------------------------------------------------------------------

Outcome dark_state() {
  const ModelConfig cfg = model(Scheme::SMSC, cutoff_for(field::Thermal{1.0}, 1));
  SystemState init = assemble_initial(AtomicLabel::EG, field::Thermal{1.0}, cfg);
  Vector dark = Vector::Zero(4);
  dark(1) = 1 / std::sqrt(2.0);
  dark(2) = -1 / std::sqrt(2.0);
  init.atoms = dark;
  const auto e = make_engine(cfg, init);
  double worst = 1.0;
  for (const Matrix& rho : trajectory(*e, cfg.grid)) {
    worst = std::min(worst, (dark.adjoint() * rho * dark).value().real());
  }
  return {worst > 1 - 1e-10, "min fidelity 1 - " + fmt(1 - worst)};
}

// 9 -------------------------------------------------------------------------------------

Outcome maximal_oscillation() {
  const ModelConfig cfg = model(Scheme::SMSC, 6);
  const auto e = make_engine(cfg, assemble_initial(AtomicLabel::GG, field::Fock{1}, cfg));
  const auto c = concurrences(trajectory(*e, cfg.grid));
  const auto cfun = concurrence_callback(*e);
  const auto times = cfg.grid.times();
  // refine every sampled local maximum and minimum
  double peak = 0.0, trough = 0.0;
  std::vector<double> zeros;
  for (std::size_t i = 1; i + 1 < c.size(); ++i) {
    const bool max = c[i] >= c[i - 1] && c[i] > c[i + 1];
    const bool min = c[i] <= c[i - 1] && c[i] < c[i + 1];
    if (!max && !min) continue;
    const double sign = max ? -1.0 : 1.0;
    const auto r = boost::math::tools::brent_find_minima(
        [&](double t) { return sign * cfun(t); }, times[i - 1], times[i + 1], 52);
    if (max) {
      peak = std::max(peak, cfun(r.first));
    } else {
      trough = std::max(trough, cfun(r.first));
      zeros.push_back(r.first);
    }
  }
  double spread = 0.0;
  for (std::size_t i = 2; i < zeros.size(); ++i) {
    spread = std::max(spread, std::abs((zeros[i] - zeros[i - 1]) - (zeros[1] - zeros[0])));
  }
  const bool ok = peak > 1 - 1e-6 && zeros.size() >= 10 && trough < kZeroConcurrence && spread < 1e-6;
  return {ok, "max C 1 - " + fmt(1 - peak) + ", " + std::to_string(zeros.size()) +
                  " returns below " + fmt(trough) + ", period spread " + fmt(spread)};
}

// 10 ------------------------------------------------------------------------------------

Outcome role_reversal() {
  struct Case {
    Scheme s;
    AtomicLabel a;
    EntanglementLabel want;
  };
  const Case cases[] = {{Scheme::TMSC, AtomicLabel::PHI, EntanglementLabel::AL},
                        {Scheme::TMSC, AtomicLabel::PSI, EntanglementLabel::DI},
                        {Scheme::TMAC, AtomicLabel::PHI, EntanglementLabel::SD},
                        {Scheme::TMAC, AtomicLabel::PSI, EntanglementLabel::DI}};
  bool ok = true;
  std::string detail;
  for (const Case& k : cases) {
    Scenario s;
    s.scheme = k.s;
    s.atomic = k.a;
    const ScenarioOutcome o = classify_scenario(s);
    hygiene.leak(o.leakage);
    ok = ok && o.cls.label == k.want;
    detail += (detail.empty() ? "" : ", ") + to_string(k.s) + " " + to_string(k.a) + " " +
              to_string(o.cls.label) + (o.cls.label == k.want ? "" : " (want " + to_string(k.want) + ")");
  }
  return {ok, detail};
}

// 11 ------------------------------------------------------------------------------------

double isometry_error(const Matrix& u, const std::vector<Index>& cols) {
  Matrix sub(u.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Index>(k)) = u.col(cols[k]);
  return (sub.adjoint() * sub - Matrix::Identity(sub.cols(), sub.cols())).cwiseAbs().maxCoeff();
}

Outcome hygiene_suite() {
  const int d = 10;
  double unitarity = 0.0;
  // block-exact propagators of every model
  for (Scheme s : {Scheme::TMSC, Scheme::TMAC, Scheme::SMSC, Scheme::DJC}) {
    ModelConfig cfg = model(s, s == Scheme::SMSC ? 30 : d);
    const BlockSpectralPropagator p(model_hamiltonian(cfg));
    for (double t : {0.3, 7.1, 25.0}) {
      const Matrix u = p.at(t).matrix;
      unitarity = std::max(unitarity, (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()))
                                          .cwiseAbs()
                                          .maxCoeff());
    }
  }
  // closed forms, on the excitation blocks they describe exactly
  const int ds = 30;
  const SpaceLayout ls({2, 2, ds}, {"atom1", "atom2", "TF1"});
  const auto ex = excitation_numbers(ls);
  std::vector<Index> smsc_cols, djc_cols;
  for (Index i = 0; i < ls.total_dim(); ++i)
    if (ex[i] <= ds - 1) smsc_cols.push_back(i);
  const SpaceLayout ld({2, 2, d, d}, {"atom1", "atom2", "TF1", "TF2"});
  for (Index i = 0; i < ld.total_dim(); ++i) {
    const auto x = ld.decode(i);
    if (x[2] + (x[0] == 0) <= d - 1 && x[3] + (x[1] == 0) <= d - 1) djc_cols.push_back(i);
  }
  for (double t : {0.3, 7.1, 25.0}) {
    unitarity = std::max(unitarity, isometry_error(propagator_smsc_closed(t, 1.0, ds).matrix, smsc_cols));
    unitarity = std::max(unitarity, isometry_error(propagator_djc_closed(t, 1.0, d).matrix, djc_cols));
  }
  // trajectories over every labelled atomic state and a spread of fields
  const std::vector<FieldSpec> two{field::Vacuum{}, field::FockPair{1, 2}, field::CoherentPair{0.7, -0.4},
                                   field::TwoModeSqueezed{0.4}, field::Thermal{0.4}};
  for (Scheme s : {Scheme::TMSC, Scheme::TMAC}) {
    for (const FieldSpec& f : two) {
      for (AtomicLabel a : {AtomicLabel::EE, AtomicLabel::EG, AtomicLabel::GE, AtomicLabel::GG,
                            AtomicLabel::PHI, AtomicLabel::PSI}) {
        Scenario sc;
        sc.scheme = s;
        sc.atomic = a;
        sc.field = f;
        sc.grid.samples = 501;
        trajectory(*scenario_dynamics(sc), sc.grid);
      }
    }
  }
  const bool ok = unitarity < 1e-10 && hygiene.trace_error < 1e-10 && hygiene.leakage < 1e-6 &&
                  hygiene.ppt_violations == 0;
  return {ok, "unitarity " + fmt(unitarity) + ", trace " + fmt(hygiene.trace_error) + ", leakage " +
                  fmt(hygiene.leakage) + ", PPT/C mismatches " + std::to_string(hygiene.ppt_violations) +
                  " of " + std::to_string(hygiene.samples) + " samples (worst bound gap " +
                  fmt(hygiene.worst_ppt_gap) + ")"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  // criteria that cannot be met as stated; see README "Known deviations"
  const std::set<int> known{3, 10};
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"backend oracle equivalence", backend_equivalence},
      {"mapping equivalence", mapping_equivalence},
      {"Table I reproduction", table_one},
      {"thermal threshold", thermal_threshold},
      {"small-squeezing negativities", small_squeezing},
      {"squeezed/thermal degeneracy", squeezed_thermal},
      {"no-generation", no_generation},
      {"dark-state protection", dark_state},
      {"maximal oscillation", maximal_oscillation},
      {"role reversal", role_reversal},
      {"numerical hygiene", hygiene_suite},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool expected_fail = known.count(id) > 0;
    if (!o.pass && !expected_fail) ++unexpected;
    if (o.pass && expected_fail) std::printf("note: criterion %d now passes\n", id);
    std::printf("criterion %2d %-30s %s  %s [%.1fs]%s\n", id, criteria[i].first.c_str(),
                o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                !o.pass && expected_fail ? " (known)" : "");
    std::fflush(stdout);
  }
  std::printf("%d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
