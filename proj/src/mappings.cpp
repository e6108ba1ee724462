#include "twomode/mappings.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace twomode {

namespace {

const std::vector<std::string> kTransformedLabels{"TF1", "TF2"};

int two_mode_cutoff(const SpaceLayout& layout) {
  if (layout.size() != 2 || layout.dims()[0] != layout.dims()[1]) {
    throw std::invalid_argument("expected a two-mode field with equal cutoffs, got " +
                                layout.describe());
  }
  return layout.dims()[0];
}

}  // namespace

ModeTransform::ModeTransform(int cutoff, bool flip_sign) : cutoff_(cutoff), flip_(flip_sign) {
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
  const int d = cutoff;
  const double theta = -std::numbers::pi / 4.0;
  for (int n = 0; n <= 2 * (d - 1); ++n) {
    const int kmin = std::max(0, n - d + 1);
    const int kmax = std::min(n, d - 1);
    const int size = kmax - kmin + 1;
    Block b;
    for (int k = kmin; k <= kmax; ++k) b.indices.push_back(static_cast<Index>(k) * d + (n - k));
    // generator theta (a1^dag a2 - a2^dag a1), real antisymmetric on the block
    Matrix gen = Matrix::Zero(size, size);
    for (int p = 0; p + 1 < size; ++p) {
      const int k = kmin + p;
      const double c = theta * std::sqrt((k + 1.0) * (n - k));
      gen(p + 1, p) += c;
      gen(p, p + 1) -= c;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(kI * gen);
    Vector ph(size);
    for (int p = 0; p < size; ++p) ph(p) = std::polar(1.0, -es.eigenvalues()(p));
    b.u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    if (!flip_) {
      for (int p = 0; p < size; ++p) {
        if ((n - kmin - p) % 2) b.u.col(p) *= -1.0;
      }
    }
    blocks_.push_back(std::move(b));
  }
}

Vector ModeTransform::apply(const Vector& v) const {
  const Index dd = static_cast<Index>(cutoff_) * cutoff_;
  if (v.size() != dd) throw std::invalid_argument("ModeTransform: size mismatch");
  Vector out = Vector::Zero(dd);
  for (const auto& b : blocks_) {
    const Index n = static_cast<Index>(b.indices.size());
    Vector local(n);
    for (Index k = 0; k < n; ++k) local(k) = v(b.indices[k]);
    if (local.isZero(0.0)) continue;
    const Vector r = b.u * local;
    for (Index k = 0; k < n; ++k) out(b.indices[k]) = r(k);
  }
  return out;
}

Vector ModeTransform::apply_adjoint(const Vector& v) const {
  const Index dd = static_cast<Index>(cutoff_) * cutoff_;
  if (v.size() != dd) throw std::invalid_argument("ModeTransform: size mismatch");
  Vector out = Vector::Zero(dd);
  for (const auto& b : blocks_) {
    const Index n = static_cast<Index>(b.indices.size());
    Vector local(n);
    for (Index k = 0; k < n; ++k) local(k) = v(b.indices[k]);
    if (local.isZero(0.0)) continue;
    const Vector r = b.u.adjoint() * local;
    for (Index k = 0; k < n; ++k) out(b.indices[k]) = r(k);
  }
  return out;
}

Matrix ModeTransform::dense() const {
  const Index dd = static_cast<Index>(cutoff_) * cutoff_;
  Matrix m = Matrix::Zero(dd, dd);
  for (const auto& b : blocks_) {
    for (std::size_t r = 0; r < b.indices.size(); ++r) {
      for (std::size_t c = 0; c < b.indices.size(); ++c) m(b.indices[r], b.indices[c]) = b.u(r, c);
    }
  }
  return m;
}

Operator ModeTransform::unitary(const std::vector<std::string>& labels) const {
  return {SpaceLayout({cutoff_, cutoff_}, labels), dense()};
}

double ModeTransform::conjugation_error() const {
  const double h = 1.0 / std::numbers::sqrt2;
  const double s2 = flip_ ? -1.0 : 1.0;  // A2 = s2 (a1 - a2)/sqrt2
  double err = 0.0;
  for (int n = 1; n <= cutoff_ - 1; ++n) {
    // complete blocks: local index = photons in mode 1
    Matrix a1 = Matrix::Zero(n, n + 1);
    Matrix a2 = Matrix::Zero(n, n + 1);
    for (int k = 0; k <= n; ++k) {
      if (k > 0) a1(k - 1, k) = std::sqrt(static_cast<double>(k));
      if (k < n) a2(k, k) = std::sqrt(static_cast<double>(n - k));
    }
    const Matrix& un = blocks_[n].u;
    const Matrix& um = blocks_[n - 1].u;
    const Matrix c1 = um * a1 * un.adjoint() - h * (a1 + a2);
    const Matrix c2 = um * a2 * un.adjoint() - s2 * h * (a1 - a2);
    err = std::max({err, c1.cwiseAbs().maxCoeff(), c2.cwiseAbs().maxCoeff()});
  }
  return err;
}

ModeTransform mode_transform_unitary(int cutoff, bool flip_sign) {
  ModeTransform u(cutoff, flip_sign);
  const double err = u.conjugation_error();
  if (err > 1e-10) {
    std::ostringstream os;
    os << "mode transform conjugation check failed: " << err;
    throw NumericalError(os.str());
  }
  return u;
}

// ---- state maps ------------------------------------------------------------------------

DensityMatrix tmsc_to_smsc(const StateVector& field, bool flip_sign) {
  const int d = two_mode_cutoff(field.layout());
  const ModeTransform u = mode_transform_unitary(d, flip_sign);
  const SpaceLayout l({d, d}, kTransformedLabels);
  const Matrix rho = reduce_pure(u.apply(field.vector()), l, {"TF1"});
  return DensityMatrix(l.subset({"TF1"}), rho / rho.trace().real());
}

DensityMatrix tmsc_to_smsc(const DensityMatrix& field, bool flip_sign) {
  return partial_trace(tmac_to_djc(field, flip_sign), {"TF1"});
}

StateVector tmac_to_djc(const StateVector& field, bool flip_sign) {
  const int d = two_mode_cutoff(field.layout());
  const ModeTransform u = mode_transform_unitary(d, flip_sign);
  return StateVector::normalized(SpaceLayout({d, d}, kTransformedLabels), u.apply(field.vector()));
}

DensityMatrix tmac_to_djc(const DensityMatrix& field, bool flip_sign) {
  const int d = two_mode_cutoff(field.layout());
  const Matrix u = mode_transform_unitary(d, flip_sign).dense();
  return DensityMatrix(SpaceLayout({d, d}, kTransformedLabels), u * field.matrix() * u.adjoint());
}

FieldState tmsc_to_smsc(const FieldState& field, bool flip_sign) {
  const SpaceLayout layout = field.layout();
  const int d = two_mode_cutoff(layout);
  if (field.number_invariant()) {
    if (field.is_product()) {
      Ensemble first = field.factors().front();
      first.layout = SpaceLayout({d}, {"TF1"});
      return FieldState::product({first}, true);
    }
    const Ensemble e = field.ensemble();
    Matrix rho = Matrix::Zero(d, d);
    for (std::size_t c = 0; c < e.size(); ++c) rho += e.weights[c] * reduce_pure(e.states[c], layout, {layout.labels()[0]});
    return FieldState::product(
        {Ensemble::from_density(DensityMatrix(SpaceLayout({d}, {"TF1"}), rho))}, true);
  }
  const ModeTransform u = mode_transform_unitary(d, flip_sign);
  const SpaceLayout l({d, d}, kTransformedLabels);
  const Ensemble e = field.ensemble();
  Matrix rho = Matrix::Zero(d, d);
  for (std::size_t c = 0; c < e.size(); ++c) rho += e.weights[c] * reduce_pure(u.apply(e.states[c]), l, {"TF1"});
  rho /= rho.trace().real();
  return FieldState::product({Ensemble::from_density(DensityMatrix(l.subset({"TF1"}), rho))});
}

FieldState tmac_to_djc(const FieldState& field, bool flip_sign) {
  const int d = two_mode_cutoff(field.layout());
  if (field.number_invariant()) return field.relabeled(kTransformedLabels);
  const ModeTransform u = mode_transform_unitary(d, flip_sign);
  Ensemble e = field.ensemble();
  e.layout = SpaceLayout({d, d}, kTransformedLabels);
  for (auto& v : e.states) v = u.apply(v);
  return FieldState::joint(std::move(e));
}

// ---- verification ----------------------------------------------------------------------

std::optional<FieldSpec> mapped_field(const FieldSpec& original, Scheme scheme) {
  if (scheme != Scheme::TMSC && scheme != Scheme::TMAC) return std::nullopt;
  const bool sc = scheme == Scheme::TMSC;
  const double h = 1.0 / std::sqrt(2.0);
  return std::visit(
      [&](const auto& f) -> std::optional<FieldSpec> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, field::Vacuum> || std::is_same_v<T, field::Thermal>) {
          return f;
        } else if constexpr (std::is_same_v<T, field::FockPair>) {
          if (sc) return field::RhoNM{f.n, f.m};
          return field::EtaNM{f.n, f.m};
        } else if constexpr (std::is_same_v<T, field::EtaNM>) {
          if (sc) return field::Fock{f.n};
          return field::FockPair{f.n, f.m};
        } else if constexpr (std::is_same_v<T, field::CoherentPair>) {
          if (sc) return field::Coherent{h * (f.alpha + f.beta)};
          return field::CoherentPair{h * (f.alpha + f.beta), h * (f.alpha - f.beta)};
        } else if constexpr (std::is_same_v<T, field::SqueezedPair>) {
          if (sc) return field::Thermal{std::pow(std::sinh(std::abs(f.xi)), 2)};
          return field::TwoModeSqueezed{-f.xi};
        } else if constexpr (std::is_same_v<T, field::TwoModeSqueezed>) {
          if (sc) return field::Squeezed{-f.xi};
          return field::SqueezedPair{-f.xi};
        } else {
          return std::nullopt;
        }
      },
      original);
}

EquivalenceReport verify_equivalence(AtomicLabel atomic, const FieldSpec& field, Scheme scheme,
                                     const TimeGrid& grid, int cutoff, double g,
                                     double tau_leak) {
  if (scheme != Scheme::TMSC && scheme != Scheme::TMAC) {
    throw std::invalid_argument("verify_equivalence: scheme must be TMSC or TMAC");
  }
  ModelConfig cfg;
  cfg.scheme = scheme;
  cfg.g = g;
  cfg.grid = grid;
  cfg.cutoff = cutoff > 0 ? cutoff : std::max(6, auto_cutoff(field, 2, 1e-12, 1e-10));
  const SystemState init = assemble_initial(atomic, field, cfg);
  const auto full = make_engine(cfg, init, Backend::BlockExact);
  const auto reduced = make_dynamics(cfg, init, Backend::Auto);
  EquivalenceReport rep;
  rep.cutoff = cfg.cutoff;
  rep.leakage = std::max(full->leakage(), reduced->leakage());
  if (rep.leakage > tau_leak) {
    std::ostringstream os;
    os << "verify_equivalence: leakage " << rep.leakage << " exceeds " << tau_leak
       << " at cutoff " << cfg.cutoff;
    throw TruncationError(os.str(), 0);
  }
  for (double t : grid.times()) {
    rep.max_trace_distance =
        std::max(rep.max_trace_distance, trace_distance(full->atomic(t), reduced->atomic(t)));
  }
  return rep;
}

}  // namespace twomode
