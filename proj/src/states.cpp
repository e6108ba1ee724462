#include "twomode/states.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace twomode {

namespace {

constexpr int kMaxCutoffSearch = 20000;

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

template <class Tail>
int smallest_cutoff(Tail tail, double tau, int from) {
  for (int d = std::max(1, from); d <= kMaxCutoffSearch; ++d) {
    if (tail(d) <= tau) return d;
  }
  return 0;
}

template <class Tail>
void require_tail(const char* what, Tail tail, int cutoff, double tau) {
  const double mass = tail(cutoff);
  if (mass > tau) {
    const int need = smallest_cutoff(tail, tau, cutoff);
    std::ostringstream os;
    os << what << ": truncation insufficient, tail mass " << mass << " beyond cutoff " << cutoff
       << " exceeds " << tau << "; cutoff " << need << " required";
    throw TruncationError(os.str(), need);
  }
}

void require_cutoff(int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; i + j < a.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> delta_dist(int n, int nmax) {
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (n <= nmax) p[n] = 1.0;
  return p;
}

std::vector<double> poisson_dist(double x, int nmax) {
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (x == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (int n = 0; n <= nmax; ++n) p[n] = std::exp(-x + n * std::log(x) - log_factorial(n));
  return p;
}

double squeezed_log_prob(double r, int k) {  // log P(2k)
  const double t = std::tanh(r);
  return 2.0 * k * std::log(t) + log_factorial(2 * k) - 2.0 * k * std::log(2.0) -
         2.0 * log_factorial(k) - std::log(std::cosh(r));
}

std::vector<double> squeezed_dist(double r, int nmax) {
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
  if (r == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (int k = 0; 2 * k <= nmax; ++k) p[2 * k] = std::exp(squeezed_log_prob(r, k));
  return p;
}

std::vector<double> thermal_dist(double nbar, int nmax) {
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
  const double q = nbar / (1.0 + nbar);
  for (int n = 0; n <= nmax; ++n) p[n] = std::pow(q, n) / (1.0 + nbar);
  return p;
}

SpaceLayout mode_layout(const std::string& label, int cutoff) { return {{cutoff}, {label}}; }

}  // namespace

// ---- atoms -----------------------------------------------------------------------------

std::string to_string(AtomicLabel a) {
  switch (a) {
    case AtomicLabel::GG: return "GG";
    case AtomicLabel::EE: return "EE";
    case AtomicLabel::EG: return "EG";
    case AtomicLabel::GE: return "GE";
    case AtomicLabel::PHI: return "PHI";
    case AtomicLabel::PSI: return "PSI";
  }
  return "?";
}

AtomicLabel parse_atomic_label(std::string_view s) {
  if (s == "GG") return AtomicLabel::GG;
  if (s == "EE") return AtomicLabel::EE;
  if (s == "EG") return AtomicLabel::EG;
  if (s == "GE") return AtomicLabel::GE;
  if (s == "PHI") return AtomicLabel::PHI;
  if (s == "PSI") return AtomicLabel::PSI;
  throw std::invalid_argument("unknown atomic label '" + std::string(s) + "'");
}

StateVector atomic_state(AtomicLabel label) {
  Vector v = Vector::Zero(4);
  const double h = 1.0 / std::numbers::sqrt2;
  switch (label) {
    case AtomicLabel::EE: v(0) = 1.0; break;
    case AtomicLabel::EG: v(1) = 1.0; break;
    case AtomicLabel::GE: v(2) = 1.0; break;
    case AtomicLabel::GG: v(3) = 1.0; break;
    case AtomicLabel::PHI: v(0) = h; v(3) = h; break;
    case AtomicLabel::PSI: v(1) = h; v(2) = h; break;
  }
  return StateVector({{2, 2}, kAtomLabels}, std::move(v));
}

// ---- tails -----------------------------------------------------------------------------

double coherent_tail(double x, int cutoff) {
  if (x <= 0.0) return cutoff >= 1 ? 0.0 : 1.0;
  double sum = 0.0;
  for (int n = std::max(cutoff, 0);; ++n) {
    const double term = std::exp(-x + n * std::log(x) - log_factorial(n));
    sum += term;
    if (n > x && (term < 1e-300 || term < 1e-18 * sum)) break;
  }
  return sum;
}

double squeezed_tail(double r, int cutoff) {
  if (r == 0.0) return cutoff >= 1 ? 0.0 : 1.0;
  double sum = 0.0;
  double prev = 0.0;
  for (int k = (std::max(cutoff, 0) + 1) / 2;; ++k) {
    const double term = std::exp(squeezed_log_prob(r, k));
    sum += term;
    if (term < prev && (term < 1e-300 || term < 1e-18 * sum)) break;
    prev = term;
  }
  return sum;
}

double thermal_tail(double nbar, int cutoff) {
  if (nbar <= 0.0) return cutoff >= 1 ? 0.0 : 1.0;
  return std::pow(nbar / (1.0 + nbar), cutoff);
}

double two_mode_squeezed_tail(double r, int cutoff) {
  const double s = std::sinh(r);
  return thermal_tail(s * s, cutoff);
}

// ---- constructors ----------------------------------------------------------------------

StateVector fock_state(int n, int cutoff, std::string label) {
  if (n < 0) throw std::invalid_argument("fock_state: negative photon number");
  if (n >= cutoff) {
    throw TruncationError("fock_state: |" + std::to_string(n) + "> needs cutoff " +
                              std::to_string(n + 1),
                          n + 1);
  }
  Vector v = Vector::Zero(cutoff);
  v(n) = 1.0;
  return StateVector(mode_layout(label, cutoff), std::move(v));
}

StateVector coherent_state(cplx alpha, int cutoff, double tau_tail, std::string label) {
  require_cutoff(cutoff);
  const double x = std::norm(alpha);
  require_tail("coherent_state", [x](int d) { return coherent_tail(x, d); }, cutoff, tau_tail);
  Vector v(cutoff);
  v(0) = std::exp(-0.5 * x);
  for (int n = 1; n < cutoff; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return StateVector::normalized(mode_layout(label, cutoff), std::move(v));
}

StateVector squeezed_vacuum(cplx xi, int cutoff, double tau_tail, std::string label) {
  require_cutoff(cutoff);
  const double r = std::abs(xi);
  require_tail("squeezed_vacuum", [r](int d) { return squeezed_tail(r, d); }, cutoff, tau_tail);
  Vector v = Vector::Zero(cutoff);
  v(0) = 1.0 / std::sqrt(std::cosh(r));
  if (r > 0.0) {
    const cplx step = std::polar(std::tanh(r), std::arg(xi));
    for (int k = 1; 2 * k < cutoff; ++k) {
      v(2 * k) = v(2 * k - 2) * step * std::sqrt((2.0 * k - 1.0) / (2.0 * k));
    }
  }
  return StateVector::normalized(mode_layout(label, cutoff), std::move(v));
}

StateVector two_mode_squeezed_vacuum(cplx xi, int cutoff, double tau_tail,
                                     std::vector<std::string> labels) {
  require_cutoff(cutoff);
  const double r = std::abs(xi);
  require_tail("two_mode_squeezed_vacuum",
               [r](int d) { return two_mode_squeezed_tail(r, d); }, cutoff, tau_tail);
  // The generator only connects |n,n> pairs; exponentiate it on a padded pair ladder so the
  // boundary of the ladder is far beyond the retained amplitudes.
  const int pad = std::max(2 * cutoff, cutoff + 64);
  Matrix gen = Matrix::Zero(pad, pad);
  for (int n = 0; n + 1 < pad; ++n) {
    gen(n + 1, n) = -xi * static_cast<double>(n + 1);
    gen(n, n + 1) = std::conj(xi) * static_cast<double>(n + 1);
  }
  // gen is anti-Hermitian: gen = -i K with K = i gen Hermitian.
  Eigen::SelfAdjointEigenSolver<Matrix> es(kI * gen);
  const Vector phases = (-kI * es.eigenvalues().cast<cplx>()).array().exp().matrix();
  const Vector ladder =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().row(0).adjoint();
  Vector v = Vector::Zero(static_cast<Index>(cutoff) * cutoff);
  for (int n = 0; n < cutoff; ++n) v(static_cast<Index>(n) * cutoff + n) = ladder(n);
  return StateVector::normalized(SpaceLayout({cutoff, cutoff}, std::move(labels)), std::move(v));
}

DensityMatrix thermal_state(double nbar, int cutoff, double tau_tail, std::string label) {
  require_cutoff(cutoff);
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw std::invalid_argument("thermal_state: nbar must be >= 0");
  }
  require_tail("thermal_state", [nbar](int d) { return thermal_tail(nbar, d); }, cutoff,
               tau_tail);
  const auto p = thermal_dist(nbar, cutoff - 1);
  double total = 0.0;
  for (double x : p) total += x;
  Matrix m = Matrix::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) m(n, n) = p[n] / total;
  return DensityMatrix(mode_layout(label, cutoff), std::move(m));
}

Vector eta_nm_raw(int n, int m, int cutoff) {
  if (n < 0 || m < 0) throw std::invalid_argument("eta_nm: negative photon number");
  if (cutoff < n + m + 1) {
    throw TruncationError("eta_nm: each mode needs dimension >= n+m+1 = " +
                              std::to_string(n + m + 1),
                          n + m + 1);
  }
  auto binom = [](int a, int b) {
    return std::exp(log_factorial(a) - log_factorial(b) - log_factorial(a - b));
  };
  const double norm = std::exp(-0.5 * ((m + n) * std::log(2.0) + log_factorial(m) +
                                       log_factorial(n)));
  Vector v = Vector::Zero(static_cast<Index>(cutoff) * cutoff);
  for (int k = 0; k <= n; ++k) {
    for (int l = 0; l <= m; ++l) {
      const int first = m + n - k - l;
      const int second = k + l;
      const double amp = binom(n, k) * binom(m, l) *
                         std::exp(0.5 * (log_factorial(first) + log_factorial(second))) *
                         ((l % 2) ? -1.0 : 1.0);
      v(static_cast<Index>(first) * cutoff + second) += amp * norm;
    }
  }
  return v;
}

StateVector eta_nm(int n, int m, int cutoff, std::vector<std::string> labels) {
  return StateVector::normalized(SpaceLayout({cutoff, cutoff}, std::move(labels)),
                                 eta_nm_raw(n, m, cutoff));
}

DensityMatrix rho_nm(int n, int m, int cutoff, std::string label) {
  const StateVector eta = eta_nm(n, m, cutoff, {label, label + "_traced"});
  return partial_trace(eta, {label});
}

// ---- field specs -----------------------------------------------------------------------

int field_modes(const FieldSpec& spec) {
  return std::visit(
      [](const auto& f) -> int {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum> || std::is_same_v<T, field::Thermal>) {
          return 0;
        } else if constexpr (std::is_same_v<T, field::Fock> ||
                             std::is_same_v<T, field::Coherent> ||
                             std::is_same_v<T, field::Squeezed> ||
                             std::is_same_v<T, field::RhoNM>) {
          return 1;
        } else {
          return 2;
        }
      },
      spec);
}

namespace {
std::string cstr(cplx z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
  return os.str();
}
}  // namespace

std::string describe(const FieldSpec& spec) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum>) return "Vacuum";
        else if constexpr (std::is_same_v<T, field::Fock>) return "Fock(" + std::to_string(f.n) + ")";
        else if constexpr (std::is_same_v<T, field::FockPair>)
          return "FockPair(" + std::to_string(f.n) + "," + std::to_string(f.m) + ")";
        else if constexpr (std::is_same_v<T, field::Coherent>) return "Coherent(" + cstr(f.alpha) + ")";
        else if constexpr (std::is_same_v<T, field::CoherentPair>)
          return "CoherentPair(" + cstr(f.alpha) + "," + cstr(f.beta) + ")";
        else if constexpr (std::is_same_v<T, field::Squeezed>) return "Squeezed(" + cstr(f.xi) + ")";
        else if constexpr (std::is_same_v<T, field::SqueezedPair>) return "SqueezedPair(" + cstr(f.xi) + ")";
        else if constexpr (std::is_same_v<T, field::TwoModeSqueezed>)
          return "TwoModeSqueezed(" + cstr(f.xi) + ")";
        else if constexpr (std::is_same_v<T, field::Thermal>) {
          std::ostringstream os;
          os << "Thermal(" << f.nbar << ")";
          return os.str();
        } else if constexpr (std::is_same_v<T, field::EtaNM>)
          return "EtaNM(" + std::to_string(f.n) + "," + std::to_string(f.m) + ")";
        else
          return "RhoNM(" + std::to_string(f.n) + "," + std::to_string(f.m) + ")";
      },
      spec);
}

void validate(const FieldSpec& spec) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Fock>) {
          if (f.n < 0) throw std::invalid_argument("Fock: n must be >= 0");
        } else if constexpr (std::is_same_v<T, field::FockPair> ||
                             std::is_same_v<T, field::EtaNM> || std::is_same_v<T, field::RhoNM>) {
          if (f.n < 0 || f.m < 0) throw std::invalid_argument(describe(f) + ": n, m must be >= 0");
        } else if constexpr (std::is_same_v<T, field::Thermal>) {
          if (!(f.nbar >= 0.0) || !std::isfinite(f.nbar)) {
            throw std::invalid_argument("Thermal: nbar must be >= 0");
          }
        }
      },
      spec);
}

std::vector<double> photon_number_distribution(const FieldSpec& spec, int modes, int nmax) {
  validate(spec);
  const int declared = field_modes(spec);
  if (declared != 0 && declared != modes) {
    throw std::invalid_argument(describe(spec) + " does not describe a " +
                                std::to_string(modes) + "-mode field");
  }
  return std::visit(
      [&](const auto& f) -> std::vector<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum>) return delta_dist(0, nmax);
        else if constexpr (std::is_same_v<T, field::Fock>) return delta_dist(f.n, nmax);
        else if constexpr (std::is_same_v<T, field::FockPair> || std::is_same_v<T, field::EtaNM>)
          return delta_dist(f.n + f.m, nmax);
        else if constexpr (std::is_same_v<T, field::RhoNM>) {
          const DensityMatrix rho = rho_nm(f.n, f.m, f.n + f.m + 1);
          std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
          for (int k = 0; k <= std::min(nmax, f.n + f.m); ++k) p[k] = rho.matrix()(k, k).real();
          return p;
        } else if constexpr (std::is_same_v<T, field::Coherent>)
          return poisson_dist(std::norm(f.alpha), nmax);
        else if constexpr (std::is_same_v<T, field::CoherentPair>)
          return poisson_dist(std::norm(f.alpha) + std::norm(f.beta), nmax);
        else if constexpr (std::is_same_v<T, field::Squeezed>)
          return squeezed_dist(std::abs(f.xi), nmax);
        else if constexpr (std::is_same_v<T, field::SqueezedPair>) {
          const auto p = squeezed_dist(std::abs(f.xi), nmax);
          return convolve(p, p);
        } else if constexpr (std::is_same_v<T, field::TwoModeSqueezed>) {
          std::vector<double> p(static_cast<std::size_t>(nmax) + 1, 0.0);
          const double r = std::abs(f.xi);
          const double t2 = std::tanh(r) * std::tanh(r);
          const double c2 = std::cosh(r) * std::cosh(r);
          for (int n = 0; 2 * n <= nmax; ++n) p[2 * n] = std::pow(t2, n) / c2;
          return p;
        } else {  // Thermal
          const auto p = thermal_dist(f.nbar, nmax);
          return modes == 2 ? convolve(p, p) : p;
        }
      },
      spec);
}

double per_mode_tail(const FieldSpec& spec, int modes, int cutoff) {
  (void)modes;
  auto fixed = [cutoff](int n) { return n < cutoff ? 0.0 : 1.0; };
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum>) return fixed(0);
        else if constexpr (std::is_same_v<T, field::Fock>) return fixed(f.n);
        else if constexpr (std::is_same_v<T, field::FockPair>) return fixed(std::max(f.n, f.m));
        else if constexpr (std::is_same_v<T, field::EtaNM> || std::is_same_v<T, field::RhoNM>)
          return fixed(f.n + f.m);
        else if constexpr (std::is_same_v<T, field::Coherent>)
          return coherent_tail(std::norm(f.alpha), cutoff);
        else if constexpr (std::is_same_v<T, field::CoherentPair>)
          return std::max(coherent_tail(std::norm(f.alpha), cutoff),
                          coherent_tail(std::norm(f.beta), cutoff));
        else if constexpr (std::is_same_v<T, field::Squeezed> ||
                           std::is_same_v<T, field::SqueezedPair>)
          return squeezed_tail(std::abs(f.xi), cutoff);
        else if constexpr (std::is_same_v<T, field::TwoModeSqueezed>)
          return two_mode_squeezed_tail(std::abs(f.xi), cutoff);
        else
          return thermal_tail(f.nbar, cutoff);
      },
      spec);
}

std::vector<std::vector<double>> mode_number_distributions(const FieldSpec& spec, int modes,
                                                           int nmax) {
  validate(spec);
  const int declared = field_modes(spec);
  if (declared != 0 && declared != modes) {
    throw std::invalid_argument(describe(spec) + " does not describe a " +
                                std::to_string(modes) + "-mode field");
  }
  using Dists = std::vector<std::vector<double>>;
  auto same = [modes](std::vector<double> p) { return Dists(static_cast<std::size_t>(modes), p); };
  return std::visit(
      [&](const auto& f) -> Dists {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum>) return same(delta_dist(0, nmax));
        else if constexpr (std::is_same_v<T, field::Fock>) return same(delta_dist(f.n, nmax));
        else if constexpr (std::is_same_v<T, field::FockPair>)
          return {delta_dist(f.n, nmax), delta_dist(f.m, nmax)};
        else if constexpr (std::is_same_v<T, field::EtaNM> || std::is_same_v<T, field::RhoNM>) {
          const int d = f.n + f.m + 1;
          const Vector eta = eta_nm_raw(f.n, f.m, d);
          Dists out(2, std::vector<double>(static_cast<std::size_t>(nmax) + 1, 0.0));
          for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
              const double p = std::norm(eta(static_cast<Index>(a) * d + b));
              if (a <= nmax) out[0][a] += p;
              if (b <= nmax) out[1][b] += p;
            }
          }
          if (modes == 1) out.pop_back();
          return out;
        } else if constexpr (std::is_same_v<T, field::Coherent>)
          return same(poisson_dist(std::norm(f.alpha), nmax));
        else if constexpr (std::is_same_v<T, field::CoherentPair>)
          return {poisson_dist(std::norm(f.alpha), nmax), poisson_dist(std::norm(f.beta), nmax)};
        else if constexpr (std::is_same_v<T, field::Squeezed> ||
                           std::is_same_v<T, field::SqueezedPair>)
          return same(squeezed_dist(std::abs(f.xi), nmax));
        else if constexpr (std::is_same_v<T, field::TwoModeSqueezed>) {
          const double s = std::sinh(std::abs(f.xi));
          return same(thermal_dist(s * s, nmax));
        } else {
          return same(thermal_dist(f.nbar, nmax));
        }
      },
      spec);
}

int auto_cutoff(const FieldSpec& spec, int modes, double tau_tail, double tau_leak,
                int min_cutoff, BlockStructure blocks) {
  int d = std::max(min_cutoff, 2);
  while (per_mode_tail(spec, modes, d) > tau_tail) {
    if (++d > kMaxCutoffSearch) throw TruncationError("auto_cutoff: no cutoff found", 0);
  }
  auto outside = [](const std::vector<double>& p) {
    double inside = 0.0;
    for (double x : p) inside += x;
    return 1.0 - inside;
  };
  for (;; ++d) {
    if (d > kMaxCutoffSearch) throw TruncationError("auto_cutoff: no cutoff found", 0);
    const int edge = d - 4;
    if (edge <= 0) continue;
    double mass = 0.0;
    if (blocks == BlockStructure::Total) {
      mass = outside(photon_number_distribution(spec, modes, edge - 1));
    } else {
      for (const auto& p : mode_number_distributions(spec, modes, edge - 1)) {
        mass = std::max(mass, outside(p));
      }
    }
    if (mass <= 0.1 * tau_leak) return d;
  }
}

// ---- FieldState ------------------------------------------------------------------------

FieldState FieldState::product(std::vector<Ensemble> factors, bool number_invariant) {
  if (factors.empty()) throw std::invalid_argument("FieldState: no factors");
  FieldState s;
  s.factors_ = std::move(factors);
  s.number_invariant_ = number_invariant;
  return s;
}

FieldState FieldState::joint(Ensemble ensemble, bool number_invariant) {
  FieldState s;
  s.joint_ = std::move(ensemble);
  s.number_invariant_ = number_invariant;
  return s;
}

Ensemble FieldState::ensemble() const {
  if (joint_) return *joint_;
  Ensemble e = factors_.front();
  for (std::size_t k = 1; k < factors_.size(); ++k) e = tensor(e, factors_[k]);
  return e;
}

SpaceLayout FieldState::layout() const {
  if (joint_) return joint_->layout;
  SpaceLayout l = factors_.front().layout;
  for (std::size_t k = 1; k < factors_.size(); ++k) l = l.concat(factors_[k].layout);
  return l;
}

bool FieldState::is_pure() const {
  if (joint_) return joint_->is_pure();
  return std::all_of(factors_.begin(), factors_.end(), [](const Ensemble& e) { return e.is_pure(); });
}

DensityMatrix FieldState::density() const { return ensemble().to_density(); }

FieldState FieldState::relabeled(const std::vector<std::string>& labels) const {
  FieldState out = *this;
  if (out.joint_) {
    out.joint_->layout = SpaceLayout(out.joint_->layout.dims(), labels);
  } else {
    if (labels.size() != out.factors_.size()) throw std::invalid_argument("relabeled: arity");
    for (std::size_t k = 0; k < labels.size(); ++k) {
      out.factors_[k].layout = SpaceLayout(out.factors_[k].layout.dims(), {labels[k]});
    }
  }
  return out;
}

namespace {

Ensemble diagonal_ensemble(const std::string& label, int cutoff, const Matrix& diag_rho) {
  Ensemble e{mode_layout(label, cutoff), {}, {}};
  for (int n = 0; n < cutoff; ++n) {
    const double w = diag_rho(n, n).real();
    if (w <= 1e-300) continue;
    Vector v = Vector::Zero(cutoff);
    v(n) = 1.0;
    e.weights.push_back(w);
    e.states.push_back(std::move(v));
  }
  return e;
}

}  // namespace

FieldState make_field(const FieldSpec& spec, const std::vector<std::string>& labels, int cutoff,
                      double tau_tail) {
  validate(spec);
  const int modes = static_cast<int>(labels.size());
  if (modes != 1 && modes != 2) throw std::invalid_argument("make_field: 1 or 2 modes");
  const int declared = field_modes(spec);
  if (declared != 0 && declared != modes) {
    throw std::invalid_argument(describe(spec) + " does not describe a " +
                                std::to_string(modes) + "-mode field");
  }
  auto pure = [](StateVector s) { return Ensemble::pure(s); };
  return std::visit(
      [&](const auto& f) -> FieldState {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum>) {
          std::vector<Ensemble> fs;
          for (const auto& l : labels) fs.push_back(pure(fock_state(0, cutoff, l)));
          return FieldState::product(std::move(fs), true);
        } else if constexpr (std::is_same_v<T, field::Fock>) {
          return FieldState::product({pure(fock_state(f.n, cutoff, labels[0]))});
        } else if constexpr (std::is_same_v<T, field::FockPair>) {
          return FieldState::product({pure(fock_state(f.n, cutoff, labels[0])),
                                      pure(fock_state(f.m, cutoff, labels[1]))});
        } else if constexpr (std::is_same_v<T, field::Coherent>) {
          return FieldState::product({pure(coherent_state(f.alpha, cutoff, tau_tail, labels[0]))});
        } else if constexpr (std::is_same_v<T, field::CoherentPair>) {
          return FieldState::product({pure(coherent_state(f.alpha, cutoff, tau_tail, labels[0])),
                                      pure(coherent_state(f.beta, cutoff, tau_tail, labels[1]))});
        } else if constexpr (std::is_same_v<T, field::Squeezed>) {
          return FieldState::product({pure(squeezed_vacuum(f.xi, cutoff, tau_tail, labels[0]))});
        } else if constexpr (std::is_same_v<T, field::SqueezedPair>) {
          return FieldState::product({pure(squeezed_vacuum(f.xi, cutoff, tau_tail, labels[0])),
                                      pure(squeezed_vacuum(-f.xi, cutoff, tau_tail, labels[1]))});
        } else if constexpr (std::is_same_v<T, field::TwoModeSqueezed>) {
          return FieldState::joint(pure(two_mode_squeezed_vacuum(f.xi, cutoff, tau_tail, labels)));
        } else if constexpr (std::is_same_v<T, field::Thermal>) {
          std::vector<Ensemble> fs;
          for (const auto& l : labels) {
            fs.push_back(diagonal_ensemble(l, cutoff, thermal_state(f.nbar, cutoff, tau_tail, l).matrix()));
          }
          return FieldState::product(std::move(fs), true);
        } else if constexpr (std::is_same_v<T, field::EtaNM>) {
          return FieldState::joint(pure(eta_nm(f.n, f.m, cutoff, labels)));
        } else {  // RhoNM
          return FieldState::product(
              {diagonal_ensemble(labels[0], cutoff, rho_nm(f.n, f.m, cutoff, labels[0]).matrix())});
        }
      },
      spec);
}

// ---- full system -----------------------------------------------------------------------

SpaceLayout SystemState::layout() const {
  return SpaceLayout({2, 2}, kAtomLabels).concat(field.layout());
}

Ensemble SystemState::ensemble() const {
  Ensemble atom{SpaceLayout({2, 2}, kAtomLabels), {1.0}, {atoms}};
  return tensor(atom, field.ensemble());
}

SystemState assemble_initial(AtomicLabel atomic, const FieldSpec& spec, const ModelConfig& cfg,
                             double tau_tail) {
  cfg.validate();
  return SystemState{atomic_state(atomic).vector(),
                     make_field(spec, cfg.field_labels(), cfg.cutoff, tau_tail)};
}

std::variant<StateVector, DensityMatrix> to_full_state(const SystemState& s) {
  const Ensemble e = s.ensemble();
  if (e.is_pure()) return StateVector::normalized(e.layout, e.states.front());
  return e.to_density();
}

}  // namespace twomode
