#include "twomode/dynamics.hpp"

#include "twomode/mappings.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace twomode {

namespace {

struct Coupling {
  std::size_t atom;
  std::size_t mode;
  cplx amplitude;  // coefficient of s_atom^+ a_mode
};

SparseMatrix jc_sum(const SpaceLayout& layout, const std::vector<Coupling>& couplings) {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (Index i = 0; i < layout.total_dim(); ++i) {
    for (const auto& c : couplings) {
      // s+ a takes |g, n> to |e, n-1>; g is digit 1
      const int atom = layout.digit(i, c.atom);
      const int n = layout.digit(i, c.mode);
      if (atom != 1 || n == 0) continue;
      const Index j = i - layout.stride(c.atom) - layout.stride(c.mode);
      const cplx v = c.amplitude * std::sqrt(static_cast<double>(n));
      trip.emplace_back(j, i, v);
      trip.emplace_back(i, j, std::conj(v));
    }
  }
  SparseMatrix h(layout.total_dim(), layout.total_dim());
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

/// Photon distribution of every subsystem of an ensemble.
void append_marginals(const Ensemble& e, std::vector<std::vector<double>>& out) {
  const SpaceLayout& l = e.layout;
  for (std::size_t q = 0; q < l.size(); ++q) {
    std::vector<double> p(static_cast<std::size_t>(l.dims()[q]), 0.0);
    for (std::size_t c = 0; c < e.size(); ++c) {
      for (Index i = 0; i < l.total_dim(); ++i) p[l.digit(i, q)] += e.weights[c] * std::norm(e.states[c](i));
    }
    out.push_back(std::move(p));
  }
}

std::vector<std::vector<double>> mode_distributions(const FieldState& field) {
  std::vector<std::vector<double>> out;
  if (field.is_product()) {
    for (const auto& f : field.factors()) append_marginals(f, out);
  } else {
    append_marginals(field.ensemble(), out);
  }
  return out;
}

double tail_from(const std::vector<double>& p, int from) {
  double s = 0.0;
  for (int n = std::max(from, 0); n < static_cast<int>(p.size()); ++n) s += p[n];
  return s;
}

constexpr int kAtomExcitations[4] = {2, 1, 1, 0};  // ee, eg, ge, gg

/// Population with excitation >= cutoff-2 in either atom-mode pair (union bound).
double per_mode_leakage(const SystemState& s, int cutoff) {
  const auto modes = mode_distributions(s.field);
  double leak = 0.0;
  for (std::size_t i = 0; i < 2 && i < modes.size(); ++i) {
    double pe = 0.0;
    for (int x = 0; x < 4; ++x) {
      const bool excited = (i == 0 ? x / 2 : x % 2) == 0;
      if (excited) pe += std::norm(s.atoms(x));
    }
    leak += pe * tail_from(modes[i], cutoff - 3) + (1.0 - pe) * tail_from(modes[i], cutoff - 2);
  }
  return leak;
}

Matrix atoms_from_vector(const Vector& psi) {
  const Index df = psi.size() / 4;
  Eigen::Map<const Matrix> mt(psi.data(), df, 4);
  return mt.transpose() * mt.conjugate();
}

void require_layout(const ModelConfig& cfg, const SystemState& s) {
  if (!(s.layout() == cfg.layout())) {
    throw std::invalid_argument("initial state layout " + s.layout().describe() +
                                " does not match model layout " + cfg.layout().describe());
  }
  if (s.atoms.size() != 4) throw std::invalid_argument("atomic state must have 4 amplitudes");
}

constexpr int kFieldDensityLimit = 1024;

// ---- SMSC closed-form engine -----------------------------------------------------------

class SmscEngine final : public ReducedDynamics {
 public:
  SmscEngine(const ModelConfig& cfg, const SystemState& s)
      : g_(cfg.g), d_(cfg.cutoff), atoms_(s.atoms), field_(s.field.ensemble()),
        leak_(leakage_population(s, cfg.cap() + 1)) {}

  Matrix atomic(double t) const override {
    const AtomBlocks u = smsc_blocks(t, g_, d_);
    Matrix rho = Matrix::Zero(4, 4);
    std::array<Vector, 4> psi;
    for (std::size_t c = 0; c < field_.size(); ++c) {
      const Vector& v = field_.states[c];
      for (int x = 0; x < 4; ++x) {
        psi[x] = Vector::Zero(d_);
        for (int y = 0; y < 4; ++y) {
          if (atoms_(y) == 0.0) continue;
          const BlockEntry& e = u(x, y);
          psi[x] += (e.factor * atoms_(y)) * e.op.apply(v);
        }
      }
      for (int x = 0; x < 4; ++x) {
        for (int y = 0; y <= x; ++y) {
          const cplx r = field_.weights[c] * psi[y].dot(psi[x]);
          rho(x, y) += r;
          if (y != x) rho(y, x) += std::conj(r);
        }
      }
    }
    return rho;
  }

  double leakage() const override { return leak_; }
  Backend backend() const override { return Backend::SmscClosed; }

 private:
  double g_;
  int d_;
  Vector atoms_;
  Ensemble field_;
  double leak_;
};

// ---- DJC closed-form engine ------------------------------------------------------------

class DjcEngine final : public ReducedDynamics {
 public:
  DjcEngine(const ModelConfig& cfg, const SystemState& s)
      : g_(cfg.g), d_(cfg.cutoff), atoms_(s.atoms), leak_(per_mode_leakage(s, cfg.cap() + 1)) {
    if (s.field.is_product() && s.field.factors().size() == 2) {
      product_ = true;
      factors_ = s.field.factors();
    }
    if (!product_ || d_ * d_ <= kFieldDensityLimit) load_joint(s.field);
  }

  Matrix atomic(double t) const override {
    const AtomBlocks k = djc_blocks(t, g_, d_);
    return product_ ? atomic_product(k) : atomic_joint(k);
  }

  std::optional<DensityMatrix> field(double t) const override {
    if (d_ * d_ > kFieldDensityLimit || joint_.empty()) return std::nullopt;
    const AtomBlocks k = djc_blocks(t, g_, d_);
    const Index dd = static_cast<Index>(d_) * d_;
    Matrix rho = Matrix::Zero(dd, dd);
    for (std::size_t c = 0; c < joint_.size(); ++c) {
      for (const Matrix& y : evolve(k, joint_[c])) {
        const Matrix yt = y.transpose();  // column-major storage of yt is row-major y
        Eigen::Map<const Vector> v(yt.data(), dd);
        rho.noalias() += weights_[c] * v * v.adjoint();
      }
    }
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    const double tr = herm.trace().real();
    return DensityMatrix(SpaceLayout({d_, d_}, {"TF1", "TF2"}), herm / tr);
  }

  double leakage() const override { return leak_; }
  Backend backend() const override { return Backend::DjcClosed; }

 private:
  void load_joint(const FieldState& field) {
    const Ensemble e = field.ensemble();
    joint_.clear();
    weights_ = e.weights;
    for (const Vector& v : e.states) {
      // row-major (TF1, TF2) -> matrix with TF1 rows
      Eigen::Map<const Matrix> colmajor(v.data(), d_, d_);
      joint_.push_back(colmajor.transpose());
    }
  }

  /// Y_{i'j'} for every final atomic pair, given the field matrix of one component.
  std::array<Matrix, 4> evolve(const AtomBlocks& k, const Matrix& phi) const {
    std::array<Matrix, 4> p;  // p[2i'+i] = K_{i'i} phi
    for (int ip = 0; ip < 2; ++ip) {
      for (int i = 0; i < 2; ++i) p[2 * ip + i] = k(ip, i).factor * k(ip, i).op.apply_rows(phi);
    }
    std::array<Matrix, 4> q;  // q[2i'+j] = sum_i a_ij p[2i'+i]
    for (int ip = 0; ip < 2; ++ip) {
      for (int j = 0; j < 2; ++j) {
        q[2 * ip + j] = atoms_(j) * p[2 * ip] + atoms_(2 + j) * p[2 * ip + 1];
      }
    }
    std::array<Matrix, 4> y;
    for (int ip = 0; ip < 2; ++ip) {
      for (int jp = 0; jp < 2; ++jp) {
        y[2 * ip + jp] = k(jp, 0).factor * k(jp, 0).op.apply_cols(q[2 * ip]) +
                         k(jp, 1).factor * k(jp, 1).op.apply_cols(q[2 * ip + 1]);
      }
    }
    return y;
  }

  Matrix atomic_joint(const AtomBlocks& k) const {
    Matrix rho = Matrix::Zero(4, 4);
    for (std::size_t c = 0; c < joint_.size(); ++c) {
      const auto y = evolve(k, joint_[c]);
      for (int x = 0; x < 4; ++x) {
        for (int z = 0; z <= x; ++z) {
          const cplx r = weights_[c] * (y[z].conjugate().cwiseProduct(y[x])).sum();
          rho(x, z) += r;
          if (z != x) rho(z, x) += std::conj(r);
        }
      }
    }
    return rho;
  }

  /// T(i',i,k',k) = sum_c w_c <K_{k'k} u_c, K_{i'i} u_c>, flattened as [(2i'+i)*4 + 2k'+k].
  static std::array<cplx, 16> overlaps(const AtomBlocks& k, const Ensemble& e) {
    std::array<cplx, 16> t{};
    std::array<Vector, 4> p;
    for (std::size_t c = 0; c < e.size(); ++c) {
      for (int a = 0; a < 4; ++a) p[a] = k(a / 2, a % 2).factor * k(a / 2, a % 2).op.apply(e.states[c]);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) t[a * 4 + b] += e.weights[c] * p[b].dot(p[a]);
      }
    }
    return t;
  }

  Matrix atomic_product(const AtomBlocks& k) const {
    const auto t1 = overlaps(k, factors_[0]);
    const auto t2 = overlaps(k, factors_[1]);
    Matrix rho = Matrix::Zero(4, 4);
    for (int ip = 0; ip < 2; ++ip) {
      for (int jp = 0; jp < 2; ++jp) {
        for (int kp = 0; kp < 2; ++kp) {
          for (int lp = 0; lp < 2; ++lp) {
            cplx s = 0.0;
            for (int i = 0; i < 2; ++i) {
              for (int j = 0; j < 2; ++j) {
                const cplx aij = atoms_(2 * i + j);
                if (aij == 0.0) continue;
                for (int kk = 0; kk < 2; ++kk) {
                  for (int l = 0; l < 2; ++l) {
                    const cplx akl = atoms_(2 * kk + l);
                    if (akl == 0.0) continue;
                    s += aij * std::conj(akl) * t1[(2 * ip + i) * 4 + 2 * kp + kk] *
                         t2[(2 * jp + j) * 4 + 2 * lp + l];
                  }
                }
              }
            }
            rho(2 * ip + jp, 2 * kp + lp) = s;
          }
        }
      }
    }
    return rho;
  }

  double g_;
  int d_;
  Vector atoms_;
  double leak_;
  bool product_ = false;
  std::vector<Ensemble> factors_;
  std::vector<Matrix> joint_;
  std::vector<double> weights_;
};

// ---- block-exact engine ----------------------------------------------------------------

class BlockEngine final : public ReducedDynamics {
 public:
  BlockEngine(const ModelConfig& cfg, const SystemState& s, Gauge gauge)
      : prop_(cfg.layout(), model_hamiltonian_sparse(cfg, gauge)) {
    leak_ = cfg.scheme == Scheme::DJC ? per_mode_leakage(s, cfg.cap() + 1)
                                      : leakage_population(s, cfg.cap() + 1);
    const Ensemble e = s.ensemble();
    weights_ = e.weights;
    for (const Vector& v : e.states) coords_.push_back(prop_.project(v));
    field_dim_ = cfg.layout().total_dim() / 4;
    const auto labels = cfg.field_labels();
    field_layout_ = cfg.layout().subset(labels);
  }

  Matrix atomic(double t) const override {
    Matrix rho = Matrix::Zero(4, 4);
    for (std::size_t c = 0; c < coords_.size(); ++c) {
      rho += weights_[c] * atoms_from_vector(prop_.evolve_projected(coords_[c], t));
    }
    return rho;
  }

  std::optional<DensityMatrix> field(double t) const override {
    if (field_dim_ > kFieldDensityLimit) return std::nullopt;
    Matrix rho = Matrix::Zero(field_dim_, field_dim_);
    for (std::size_t c = 0; c < coords_.size(); ++c) {
      const Vector psi = prop_.evolve_projected(coords_[c], t);
      Eigen::Map<const Matrix> mt(psi.data(), field_dim_, 4);
      rho.noalias() += weights_[c] * mt * mt.adjoint();
    }
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    return DensityMatrix(field_layout_, herm / herm.trace().real());
  }

  double leakage() const override { return leak_; }
  Backend backend() const override { return Backend::BlockExact; }

 private:
  BlockSpectralPropagator prop_;
  std::vector<double> weights_;
  std::vector<std::vector<Vector>> coords_;
  Index field_dim_ = 0;
  SpaceLayout field_layout_;
  double leak_ = 0.0;
};

}  // namespace

// ---- Hamiltonians ----------------------------------------------------------------------

SparseMatrix model_hamiltonian_sparse(const ModelConfig& cfg, Gauge gauge) {
  cfg.validate();
  const SpaceLayout layout = cfg.layout();
  const cplx u = std::polar(1.0, gauge.uniform);
  const cplx m2 = std::polar(1.0, gauge.mode2);
  const double g = cfg.g;
  const double big = std::numbers::sqrt2 * g;
  switch (cfg.scheme) {
    case Scheme::SMSC:
      return jc_sum(layout, {{0, 2, big * u}, {1, 2, big * u}});
    case Scheme::DJC:
      return jc_sum(layout, {{0, 2, big * u}, {1, 3, big * u * m2}});
    default: {
      const cplx ephi = std::polar(1.0, cfg.phase());
      return jc_sum(layout,
                    {{0, 2, g * u}, {0, 3, g * u * m2}, {1, 2, g * u}, {1, 3, g * u * m2 * ephi}});
    }
  }
}

Operator model_hamiltonian(const ModelConfig& cfg, Gauge gauge) {
  return {cfg.layout(), Matrix(model_hamiltonian_sparse(cfg, gauge))};
}

Operator interaction_hamiltonian(const ModelConfig& cfg, Gauge gauge) {
  if (cfg.scheme == Scheme::SMSC || cfg.scheme == Scheme::DJC) {
    throw std::invalid_argument("interaction_hamiltonian: two-mode scheme required");
  }
  return model_hamiltonian(cfg, gauge);
}

Operator smsc_hamiltonian(double g, int cutoff) {
  ModelConfig cfg;
  cfg.scheme = Scheme::SMSC;
  cfg.g = g;
  cfg.cutoff = cutoff;
  return model_hamiltonian(cfg);
}

Operator djc_hamiltonian(double g, int cutoff) {
  ModelConfig cfg;
  cfg.scheme = Scheme::DJC;
  cfg.g = g;
  cfg.cutoff = cutoff;
  return model_hamiltonian(cfg);
}

Operator excitation_operator(const SpaceLayout& layout) {
  const auto ex = excitation_numbers(layout);
  Matrix m = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (Index i = 0; i < layout.total_dim(); ++i) m(i, i) = ex[i];
  return {layout, std::move(m)};
}

// ---- block-exact propagator ------------------------------------------------------------

BlockSpectralPropagator::BlockSpectralPropagator(const Operator& hamiltonian)
    : BlockSpectralPropagator(hamiltonian.layout, hamiltonian.matrix.sparseView(0.0, 0.0)) {}

BlockSpectralPropagator::BlockSpectralPropagator(const SpaceLayout& layout,
                                                 const SparseMatrix& h)
    : layout_(layout) {
  if (h.rows() != layout.total_dim() || h.cols() != layout.total_dim()) {
    throw std::invalid_argument("BlockSpectralPropagator: size mismatch");
  }
  const SparseMatrix diff = h - SparseMatrix(h.adjoint());
  for (Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      if (std::abs(it.value()) > 1e-12) throw NumericalError("Hamiltonian is not Hermitian");
    }
  }
  const auto ex = excitation_numbers(layout);
  std::map<int, std::size_t> block_of;
  std::vector<Index> local(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    auto [it, inserted] = block_of.try_emplace(ex[i], blocks_.size());
    if (inserted) blocks_.emplace_back();
    Block& b = blocks_[it->second];
    local[i] = static_cast<Index>(b.indices.size());
    b.indices.push_back(static_cast<Index>(i));
  }
  std::vector<Matrix> hb(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const Index n = static_cast<Index>(blocks_[b].indices.size());
    hb[b] = Matrix::Zero(n, n);
  }
  for (Index k = 0; k < h.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
      const Index r = it.row();
      const Index c = it.col();
      if (ex[r] != ex[c]) {
        if (std::abs(it.value()) > 1e-12) {
          throw NumericalError("Hamiltonian couples different excitation blocks");
        }
        continue;
      }
      hb[block_of[ex[r]]](local[r], local[c]) += it.value();
    }
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hb[b]);
    if (es.info() != Eigen::Success) throw NumericalError("block eigensolver failed");
    blocks_[b].vectors = es.eigenvectors();
    blocks_[b].energies = es.eigenvalues();
  }
}

std::vector<Vector> BlockSpectralPropagator::project(const Vector& psi) const {
  if (psi.size() != layout_.total_dim()) throw std::invalid_argument("project: size mismatch");
  std::vector<Vector> out(blocks_.size());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    Vector local(static_cast<Index>(blk.indices.size()));
    for (std::size_t k = 0; k < blk.indices.size(); ++k) local(k) = psi(blk.indices[k]);
    if (local.isZero(0.0)) continue;
    out[b] = blk.vectors.adjoint() * local;
  }
  return out;
}

Vector BlockSpectralPropagator::evolve_projected(const std::vector<Vector>& coords,
                                                 double t) const {
  Vector out = Vector::Zero(layout_.total_dim());
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (coords[b].size() == 0) continue;
    const auto& blk = blocks_[b];
    Vector c = coords[b];
    for (Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -blk.energies(k) * t);
    const Vector local = blk.vectors * c;
    for (std::size_t k = 0; k < blk.indices.size(); ++k) out(blk.indices[k]) = local(k);
  }
  return out;
}

Vector BlockSpectralPropagator::apply(const Vector& psi, double t) const {
  return evolve_projected(project(psi), t);
}

Operator BlockSpectralPropagator::at(double t) const {
  Matrix u = Matrix::Zero(layout_.total_dim(), layout_.total_dim());
  for (const auto& blk : blocks_) {
    Vector ph(blk.energies.size());
    for (Index k = 0; k < ph.size(); ++k) ph(k) = std::polar(1.0, -blk.energies(k) * t);
    const Matrix ub = blk.vectors * ph.asDiagonal() * blk.vectors.adjoint();
    for (std::size_t r = 0; r < blk.indices.size(); ++r) {
      for (std::size_t c = 0; c < blk.indices.size(); ++c) u(blk.indices[r], blk.indices[c]) = ub(r, c);
    }
  }
  return {layout_, std::move(u)};
}

Operator propagator_block_exact(const Operator& hamiltonian, double t) {
  return BlockSpectralPropagator(hamiltonian).at(t);
}

// ---- closed forms ----------------------------------------------------------------------

Matrix AtomBlocks::dense() const {
  const int d = entries.front().op.dim();
  Matrix m = Matrix::Zero(static_cast<Index>(size) * d, static_cast<Index>(size) * d);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const BlockEntry& e = (*this)(r, c);
      m.block(static_cast<Index>(r) * d, static_cast<Index>(c) * d, d, d) = e.factor * e.op.dense();
    }
  }
  return m;
}

AtomBlocks smsc_blocks(double t, double g, int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
  const int d = cutoff;
  const FockOp id = FockOp::identity(d);
  const FockOp a = FockOp::lower(d);
  const FockOp ad = FockOp::raise(d);
  // functions of  calA = A A^dag + A^dag A = 2n+1, evaluated on the untruncated spectrum
  auto cal = [](int n) { return 2.0 * n + 1.0; };
  const FockOp f = FockOp::diagonal(d, [&](int n) {
    return std::sin(std::sqrt(4.0 * cal(n)) * g * t) / std::sqrt(2.0 * cal(n));
  });
  const FockOp cosa = FockOp::diagonal(d, [&](int n) { return std::cos(std::sqrt(4.0 * cal(n)) * g * t); });
  const FockOp w = FockOp::diagonal(d, [&](int n) {
    return (std::cos(std::sqrt(4.0 * cal(n)) * g * t) - 1.0) / cal(n);
  });
  const FockOp s1 = a * f;
  const FockOp s2 = f * ad;
  const FockOp s3 = f * a;
  const FockOp s4 = ad * f;
  const FockOp c1 = id + a * w * ad;
  const FockOp c2 = a * w * a;
  const FockOp c3 = (cosa + id) * 0.5;
  const FockOp c4 = (cosa - id) * 0.5;
  const FockOp c5 = ad * w * ad;
  const FockOp c6 = id + ad * w * a;
  const cplx one = 1.0;
  const cplx mi = -kI;
  return {4,
          {{one, c1}, {mi, s1}, {mi, s1}, {one, c2},
           {mi, s2}, {one, c3}, {one, c4}, {mi, s3},
           {mi, s2}, {one, c4}, {one, c3}, {mi, s3},
           {one, c5}, {mi, s4}, {mi, s4}, {one, c6}}};
}

AtomBlocks djc_blocks(double t, double g, int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
  const int d = cutoff;
  const double big = std::numbers::sqrt2 * g;
  const FockOp a = FockOp::lower(d);
  const FockOp ad = FockOp::raise(d);
  // sin(sqrt(2 A A^dag) g t)/sqrt(A A^dag), A A^dag = n+1
  const FockOp sn = FockOp::diagonal(d, [&](int n) {
    const double r = std::sqrt(n + 1.0);
    return std::sin(big * r * t) / r;
  });
  const FockOp c1 = FockOp::diagonal(d, [&](int n) { return std::cos(big * std::sqrt(n + 1.0) * t); });
  const FockOp c2 = FockOp::diagonal(d, [&](int n) { return std::cos(big * std::sqrt(1.0 * n) * t); });
  const cplx one = 1.0;
  const cplx mi = -kI;
  return {2, {{one, c1}, {mi, sn * a}, {mi, ad * sn}, {one, c2}}};
}

Operator propagator_smsc_closed(double t, double g, int cutoff) {
  return {SpaceLayout({2, 2, cutoff}, {"atom1", "atom2", "TF1"}), smsc_blocks(t, g, cutoff).dense()};
}

Operator propagator_djc_closed(double t, double g, int cutoff) {
  const Matrix u = djc_blocks(t, g, cutoff).dense();  // (atom, mode), atom slowest
  const SpaceLayout layout({2, 2, cutoff, cutoff}, {"atom1", "atom2", "TF1", "TF2"});
  const Index d = cutoff;
  Matrix full(layout.total_dim(), layout.total_dim());
  for (Index r = 0; r < layout.total_dim(); ++r) {
    const int x1 = layout.digit(r, 0), x2 = layout.digit(r, 1);
    const int n1 = layout.digit(r, 2), n2 = layout.digit(r, 3);
    for (Index c = 0; c < layout.total_dim(); ++c) {
      const int y1 = layout.digit(c, 0), y2 = layout.digit(c, 1);
      const int m1 = layout.digit(c, 2), m2 = layout.digit(c, 3);
      full(r, c) = u(x1 * d + n1, y1 * d + m1) * u(x2 * d + n2, y2 * d + m2);
    }
  }
  return {layout, std::move(full)};
}

// ---- engines ---------------------------------------------------------------------------

std::string to_string(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::SmscClosed: return "smsc_closed";
    case Backend::DjcClosed: return "djc_closed";
    case Backend::BlockExact: return "block_exact";
  }
  return "?";
}

Backend parse_backend(std::string_view s) {
  if (s == "auto") return Backend::Auto;
  if (s == "smsc_closed") return Backend::SmscClosed;
  if (s == "djc_closed") return Backend::DjcClosed;
  if (s == "block_exact") return Backend::BlockExact;
  throw std::invalid_argument("unknown backend '" + std::string(s) + "'");
}

std::vector<double> photon_distribution(const FieldState& field) {
  if (field.is_product()) {
    std::vector<double> p{1.0};
    for (const auto& f : field.factors()) {
      const Ensemble& e = f;
      std::vector<double> q(static_cast<std::size_t>(e.layout.total_dim()), 0.0);
      for (std::size_t c = 0; c < e.size(); ++c) {
        for (Index i = 0; i < e.layout.total_dim(); ++i) {
          int n = 0;
          for (std::size_t k = 0; k < e.layout.size(); ++k) n += e.layout.digit(i, k);
          if (static_cast<std::size_t>(n) >= q.size()) q.resize(n + 1, 0.0);
          q[n] += e.weights[c] * std::norm(e.states[c](i));
        }
      }
      p = convolve(p, q);
    }
    return p;
  }
  const Ensemble e = field.ensemble();
  std::vector<double> p;
  for (std::size_t c = 0; c < e.size(); ++c) {
    for (Index i = 0; i < e.layout.total_dim(); ++i) {
      int n = 0;
      for (std::size_t k = 0; k < e.layout.size(); ++k) n += e.layout.digit(i, k);
      if (static_cast<std::size_t>(n) >= p.size()) p.resize(n + 1, 0.0);
      p[n] += e.weights[c] * std::norm(e.states[c](i));
    }
  }
  return p;
}

double leakage_population(const SystemState& s, int cutoff) {
  const auto p = photon_distribution(s.field);
  double leak = 0.0;
  for (int x = 0; x < 4; ++x) {
    leak += std::norm(s.atoms(x)) * tail_from(p, cutoff - 2 - kAtomExcitations[x]);
  }
  return leak;
}

std::unique_ptr<ReducedDynamics> make_engine(const ModelConfig& cfg, const SystemState& initial,
                                             Backend backend, Gauge gauge) {
  cfg.validate();
  require_layout(cfg, initial);
  if (backend == Backend::Auto) {
    backend = cfg.scheme == Scheme::SMSC  ? Backend::SmscClosed
              : cfg.scheme == Scheme::DJC ? Backend::DjcClosed
                                          : Backend::BlockExact;
  }
  const bool gauged = gauge.uniform != 0.0 || gauge.mode2 != 0.0;
  switch (backend) {
    case Backend::SmscClosed:
      if (cfg.scheme != Scheme::SMSC) throw std::invalid_argument("smsc_closed needs the SMSC layout");
      if (gauged) throw std::invalid_argument("gauge phases need the block-exact backend");
      return std::make_unique<SmscEngine>(cfg, initial);
    case Backend::DjcClosed:
      if (cfg.scheme != Scheme::DJC) throw std::invalid_argument("djc_closed needs the DJC layout");
      if (gauged) throw std::invalid_argument("gauge phases need the block-exact backend");
      return std::make_unique<DjcEngine>(cfg, initial);
    default:
      return std::make_unique<BlockEngine>(cfg, initial, gauge);
  }
}

std::unique_ptr<ReducedDynamics> make_dynamics(const ModelConfig& cfg, const SystemState& initial,
                                               Backend backend) {
  cfg.validate();
  if (cfg.scheme == Scheme::SMSC || cfg.scheme == Scheme::DJC || backend == Backend::BlockExact) {
    return make_engine(cfg, initial, backend);
  }
  require_layout(cfg, initial);
  ModelConfig reduced = cfg;
  if (cfg.scheme == Scheme::TMSC && (backend == Backend::Auto || backend == Backend::SmscClosed)) {
    reduced.scheme = Scheme::SMSC;
    return make_engine(reduced, SystemState{initial.atoms, tmsc_to_smsc(initial.field)},
                       Backend::SmscClosed);
  }
  if (cfg.scheme == Scheme::TMAC && (backend == Backend::Auto || backend == Backend::DjcClosed)) {
    reduced.scheme = Scheme::DJC;
    return make_engine(reduced, SystemState{initial.atoms, tmac_to_djc(initial.field)},
                       Backend::DjcClosed);
  }
  if (backend == Backend::Auto) return make_engine(cfg, initial, Backend::BlockExact);
  throw std::invalid_argument("backend " + to_string(backend) + " does not apply to scheme " +
                              to_string(cfg.scheme));
}

std::vector<AtomicSample> evolve_reduced(const SystemState& initial, const ModelConfig& cfg,
                                         Backend backend, double tau_leak) {
  const auto engine = make_dynamics(cfg, initial, backend);
  if (engine->leakage() > tau_leak) {
    std::ostringstream os;
    os << "excitation leakage " << engine->leakage() << " exceeds " << tau_leak
       << " at cutoff " << cfg.cutoff;
    throw TruncationError(os.str(), 0);
  }
  const SpaceLayout atoms({2, 2}, kAtomLabels);
  std::vector<AtomicSample> out;
  for (double t : cfg.grid.times()) {
    Matrix rho = engine->atomic(t);
    const double defect = std::abs(rho.trace().real() - 1.0);
    if (defect > Tolerances::trace) {
      std::ostringstream os;
      os << "atomic trace defect " << defect << " at t=" << t << " (cutoff " << cfg.cutoff
         << " too small)";
      throw TruncationError(os.str(), 0);
    }
    out.push_back({t, DensityMatrix(atoms, std::move(rho))});
  }
  return out;
}

}  // namespace twomode
