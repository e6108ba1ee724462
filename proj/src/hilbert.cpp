#include "twomode/hilbert.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace twomode {

// ---- SpaceLayout -----------------------------------------------------------------------

SpaceLayout::SpaceLayout(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.size() != labels_.size()) {
    throw std::invalid_argument("SpaceLayout: dims and labels differ in length");
  }
  if (dims_.empty()) throw std::invalid_argument("SpaceLayout: no subsystems");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] < 1) throw std::invalid_argument("SpaceLayout: dimension must be positive");
    if (!seen.insert(labels_[i]).second) {
      throw std::invalid_argument("SpaceLayout: duplicate label '" + labels_[i] + "'");
    }
  }
  strides_.assign(dims_.size(), 1);
  for (std::size_t i = dims_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * dims_[i];
  total_ = strides_[0] * dims_[0];
}

bool SpaceLayout::contains(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t SpaceLayout::position(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw std::invalid_argument("unknown subsystem label '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<int> SpaceLayout::decode(Index index) const {
  if (index < 0 || index >= total_) throw std::out_of_range("SpaceLayout::decode");
  std::vector<int> out(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = digit(index, i);
  return out;
}

Index SpaceLayout::encode(std::span<const int> digits) const {
  if (digits.size() != dims_.size()) throw std::invalid_argument("SpaceLayout::encode: arity");
  Index out = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims_[i]) throw std::out_of_range("SpaceLayout::encode");
    out += digits[i] * strides_[i];
  }
  return out;
}

SpaceLayout SpaceLayout::subset(const std::vector<std::string>& keep) const {
  if (keep.empty()) throw std::invalid_argument("empty subsystem selection");
  std::vector<bool> flag(dims_.size(), false);
  for (const auto& k : keep) flag[position(k)] = true;
  std::vector<int> d;
  std::vector<std::string> l;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (flag[i]) {
      d.push_back(dims_[i]);
      l.push_back(labels_[i]);
    }
  }
  return {std::move(d), std::move(l)};
}

SpaceLayout SpaceLayout::concat(const SpaceLayout& other) const {
  auto d = dims_;
  auto l = labels_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  l.insert(l.end(), other.labels_.begin(), other.labels_.end());
  return {std::move(d), std::move(l)};
}

std::string SpaceLayout::describe() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << ", ";
    os << labels_[i] << ':' << dims_[i];
  }
  os << ']';
  return os.str();
}

// ---- value types -----------------------------------------------------------------------

Operator::Operator(SpaceLayout layout_, Matrix matrix_)
    : layout(std::move(layout_)), matrix(std::move(matrix_)) {
  if (matrix.rows() != layout.total_dim() || matrix.cols() != layout.total_dim()) {
    throw std::invalid_argument("Operator: matrix side does not match layout " +
                                layout.describe());
  }
}

StateVector::StateVector(SpaceLayout layout, Vector vector, double tol)
    : layout_(std::move(layout)), vector_(std::move(vector)) {
  if (vector_.size() != layout_.total_dim()) {
    throw std::invalid_argument("StateVector: size does not match layout " + layout_.describe());
  }
  if (std::abs(vector_.norm() - 1.0) > tol) {
    throw std::invalid_argument("StateVector: not normalized");
  }
}

StateVector StateVector::normalized(SpaceLayout layout, Vector vector) {
  const double n = vector.norm();
  if (n == 0.0) throw std::invalid_argument("StateVector: zero vector");
  vector /= n;
  return StateVector(std::move(layout), std::move(vector));
}

DensityMatrix::DensityMatrix(SpaceLayout layout, Matrix matrix)
    : layout_(std::move(layout)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != layout_.total_dim() || matrix_.cols() != layout_.total_dim()) {
    throw std::invalid_argument("DensityMatrix: matrix side does not match layout " +
                                layout_.describe());
  }
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > Tolerances::hermitian) {
    throw NumericalError("DensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
  }
  const double tr_dev = std::abs(matrix_.trace() - 1.0);
  if (tr_dev > Tolerances::trace) {
    throw NumericalError("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_dev));
  }
  Matrix herm_part = 0.5 * (matrix_ + matrix_.adjoint());
  matrix_ = std::move(herm_part);
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  Matrix m = psi.vector() * psi.vector().adjoint();
  m /= m.trace().real();
  return DensityMatrix(psi.layout(), std::move(m));
}

double DensityMatrix::purity() const { return (matrix_ * matrix_).trace().real(); }

RealVector DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

void DensityMatrix::check_psd(double tol) const {
  const double lo = eigenvalues().minCoeff();
  if (lo < -tol) {
    throw NumericalError("DensityMatrix: eigenvalue " + std::to_string(lo) +
                         " below positivity tolerance");
  }
}

Ensemble Ensemble::pure(const StateVector& psi) {
  return Ensemble{psi.layout(), {1.0}, {psi.vector()}};
}

Ensemble Ensemble::from_density(const DensityMatrix& rho, double drop) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  Ensemble out{rho.layout(), {}, {}};
  double total = 0.0;
  // descending weight order keeps the dominant components first
  for (Index k = es.eigenvalues().size(); k-- > 0;) {
    const double w = es.eigenvalues()(k);
    if (w < -Tolerances::psd) {
      throw NumericalError("Ensemble::from_density: negative eigenvalue " + std::to_string(w));
    }
    if (w <= drop) continue;
    out.weights.push_back(w);
    out.states.push_back(es.eigenvectors().col(k));
    total += w;
  }
  for (double& w : out.weights) w /= total;
  return out;
}

DensityMatrix Ensemble::to_density() const {
  const Index n = layout.total_dim();
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < states.size(); ++k) {
    m.noalias() += weights[k] * states[k] * states[k].adjoint();
  }
  m /= m.trace().real();
  return DensityMatrix(layout, std::move(m));
}

Ensemble tensor(const Ensemble& a, const Ensemble& b) {
  Ensemble out{a.layout.concat(b.layout), {}, {}};
  out.weights.reserve(a.size() * b.size());
  out.states.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out.weights.push_back(a.weights[i] * b.weights[j]);
      Vector v(a.states[i].size() * b.states[j].size());
      for (Index p = 0; p < a.states[i].size(); ++p) {
        v.segment(p * b.states[j].size(), b.states[j].size()) = a.states[i](p) * b.states[j];
      }
      out.states.push_back(std::move(v));
    }
  }
  return out;
}

// ---- operators -------------------------------------------------------------------------

namespace {
SpaceLayout single(int dim, std::string label) { return {{dim}, {std::move(label)}}; }
}  // namespace

Operator annihilation(int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("annihilation: cutoff must be >= 2");
  Matrix m = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return {single(cutoff, "mode"), std::move(m)};
}

Operator creation(int cutoff) {
  Operator a = annihilation(cutoff);
  a.matrix.adjointInPlace();
  return a;
}

Operator number_operator(int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("number_operator: cutoff must be >= 1");
  Matrix m = Matrix::Zero(cutoff, cutoff);
  for (int n = 0; n < cutoff; ++n) m(n, n) = static_cast<double>(n);
  return {single(cutoff, "mode"), std::move(m)};
}

Operator sigma_minus() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1.0;  // <g|s-|e>
  return {single(2, "atom"), std::move(m)};
}

Operator sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return {single(2, "atom"), std::move(m)};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator identity(const SpaceLayout& layout) {
  return {layout, Matrix::Identity(layout.total_dim(), layout.total_dim())};
}

Operator embed(const Matrix& op, const SpaceLayout& layout, std::string_view which) {
  const std::size_t pos = layout.position(which);
  const int d = layout.dims()[pos];
  if (op.rows() != d || op.cols() != d) {
    throw std::invalid_argument("embed: operator dimension does not match subsystem '" +
                                std::string(which) + "'");
  }
  const Index left = layout.total_dim() / (layout.stride(pos) * d);
  const Index right = layout.stride(pos);
  Matrix out = kron(Matrix::Identity(left, left), kron(op, Matrix::Identity(right, right)));
  return {layout, std::move(out)};
}

Operator embed(const Operator& op, const SpaceLayout& layout, std::string_view which) {
  if (op.layout.size() != 1) throw std::invalid_argument("embed: expected a single-subsystem op");
  return embed(op.matrix, layout, which);
}

// ---- partial operations ----------------------------------------------------------------

namespace {

// For each full index: its index inside the kept sub-layout and inside the traced remainder.
struct Split {
  std::vector<Index> kept;
  std::vector<Index> rest;
  Index kept_dim = 1;
  Index rest_dim = 1;
};

Split split_indices(const SpaceLayout& layout, const std::vector<std::string>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  std::vector<bool> flag(layout.size(), false);
  for (const auto& k : keep) flag[layout.position(k)] = true;
  Split s;
  std::vector<Index> kstride(layout.size(), 0), rstride(layout.size(), 0);
  for (std::size_t i = layout.size(); i-- > 0;) {
    if (flag[i]) {
      kstride[i] = s.kept_dim;
      s.kept_dim *= layout.dims()[i];
    } else {
      rstride[i] = s.rest_dim;
      s.rest_dim *= layout.dims()[i];
    }
  }
  const Index n = layout.total_dim();
  s.kept.resize(n);
  s.rest.resize(n);
  for (Index idx = 0; idx < n; ++idx) {
    Index k = 0, r = 0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const int d = layout.digit(idx, i);
      if (flag[i]) k += d * kstride[i]; else r += d * rstride[i];
    }
    s.kept[idx] = k;
    s.rest[idx] = r;
  }
  return s;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  const SpaceLayout& layout = rho.layout();
  const Split s = split_indices(layout, keep);
  std::vector<std::vector<Index>> buckets(static_cast<std::size_t>(s.rest_dim));
  for (Index i = 0; i < layout.total_dim(); ++i) buckets[s.rest[i]].push_back(i);
  Matrix out = Matrix::Zero(s.kept_dim, s.kept_dim);
  const Matrix& m = rho.matrix();
  for (const auto& b : buckets) {
    for (Index i : b) {
      for (Index j : b) out(s.kept[i], s.kept[j]) += m(i, j);
    }
  }
  return DensityMatrix(layout.subset(keep), std::move(out));
}

Matrix reduce_pure(const Vector& psi, const SpaceLayout& layout,
                   const std::vector<std::string>& keep) {
  if (psi.size() != layout.total_dim()) throw std::invalid_argument("reduce_pure: size mismatch");
  const Split s = split_indices(layout, keep);
  Matrix coeffs = Matrix::Zero(s.kept_dim, s.rest_dim);
  for (Index i = 0; i < layout.total_dim(); ++i) coeffs(s.kept[i], s.rest[i]) = psi(i);
  return coeffs * coeffs.adjoint();
}

DensityMatrix partial_trace(const StateVector& psi, const std::vector<std::string>& keep) {
  Matrix m = reduce_pure(psi.vector(), psi.layout(), keep);
  m /= m.trace().real();
  return DensityMatrix(psi.layout().subset(keep), std::move(m));
}

Matrix partial_transpose(const Matrix& m, const SpaceLayout& layout, std::size_t pos) {
  const Index n = layout.total_dim();
  const Index stride = layout.stride(pos);
  std::vector<Index> base(n);
  std::vector<int> dig(n);
  for (Index i = 0; i < n; ++i) {
    dig[i] = layout.digit(i, pos);
    base[i] = i - dig[i] * stride;
  }
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      out(base[i] + dig[j] * stride, base[j] + dig[i] * stride) = m(i, j);
    }
  }
  return out;
}

Operator partial_transpose(const DensityMatrix& rho, std::string_view subsystem) {
  const std::size_t pos = rho.layout().position(subsystem);
  return {rho.layout(), partial_transpose(rho.matrix(), rho.layout(), pos)};
}

Operator partial_transpose(const DensityMatrix& rho, const std::vector<std::string>& subsystems) {
  Matrix m = rho.matrix();
  for (const auto& s : subsystems) m = partial_transpose(m, rho.layout(), rho.layout().position(s));
  return {rho.layout(), std::move(m)};
}

StateVector permute_subsystems(const StateVector& psi, const std::vector<std::string>& order) {
  const SpaceLayout& from = psi.layout();
  if (order.size() != from.size()) throw std::invalid_argument("permute_subsystems: arity");
  std::vector<int> dims;
  std::vector<std::size_t> src;
  for (const auto& l : order) {
    src.push_back(from.position(l));
    dims.push_back(from.dims()[src.back()]);
  }
  SpaceLayout to(dims, order);
  Vector out(from.total_dim());
  for (Index i = 0; i < from.total_dim(); ++i) {
    Index j = 0;
    for (std::size_t k = 0; k < order.size(); ++k) j += from.digit(i, src[k]) * to.stride(k);
    out(j) = psi.vector()(i);
  }
  return StateVector(std::move(to), std::move(out));
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Matrix diff = a - b;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (!(a.layout() == b.layout())) throw std::invalid_argument("trace_distance: layout mismatch");
  return trace_distance(a.matrix(), b.matrix());
}

double fidelity(const StateVector& psi, const DensityMatrix& rho) {
  if (!(psi.layout() == rho.layout())) throw std::invalid_argument("fidelity: layout mismatch");
  return (psi.vector().adjoint() * rho.matrix() * psi.vector())(0, 0).real();
}

}  // namespace twomode
