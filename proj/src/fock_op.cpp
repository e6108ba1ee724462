#include "twomode/fock_op.hpp"

#include <cmath>

namespace twomode {

FockOp::FockOp(int dim, int shift, RealVector coeff)
    : dim_(dim), shift_(shift), coeff_(std::move(coeff)) {
  if (dim_ < 1) throw std::invalid_argument("FockOp: dimension must be positive");
  if (coeff_.size() != dim_) throw std::invalid_argument("FockOp: coefficient length");
  for (int n = 0; n < dim_; ++n) {
    if (n + shift_ < 0 || n + shift_ >= dim_) coeff_(n) = 0.0;
  }
}

FockOp FockOp::zero(int dim, int shift) { return {dim, shift, RealVector::Zero(dim)}; }

FockOp FockOp::identity(int dim) { return {dim, 0, RealVector::Ones(dim)}; }

FockOp FockOp::diagonal(int dim, const std::function<double(int)>& f) {
  RealVector c(dim);
  for (int n = 0; n < dim; ++n) c(n) = f(n);
  return {dim, 0, std::move(c)};
}

FockOp FockOp::lower(int dim) {
  RealVector c(dim);
  for (int n = 0; n < dim; ++n) c(n) = std::sqrt(static_cast<double>(n));
  return {dim, -1, std::move(c)};
}

FockOp FockOp::raise(int dim) {
  RealVector c(dim);
  for (int n = 0; n < dim; ++n) c(n) = std::sqrt(static_cast<double>(n + 1));
  return {dim, +1, std::move(c)};
}

FockOp FockOp::operator*(const FockOp& rhs) const {
  if (dim_ != rhs.dim_) throw std::invalid_argument("FockOp: dimension mismatch");
  RealVector c = RealVector::Zero(dim_);
  for (int n = 0; n < dim_; ++n) {
    const int mid = n + rhs.shift_;
    if (mid >= 0 && mid < dim_) c(n) = rhs.coeff_(n) * coeff_(mid);
  }
  return {dim_, shift_ + rhs.shift_, std::move(c)};
}

FockOp FockOp::operator+(const FockOp& rhs) const {
  if (dim_ != rhs.dim_) throw std::invalid_argument("FockOp: dimension mismatch");
  if (shift_ != rhs.shift_) {
    if (rhs.coeff_.isZero(0.0)) return *this;
    if (coeff_.isZero(0.0)) return rhs;
    throw std::invalid_argument("FockOp: cannot add operators with different shifts");
  }
  return {dim_, shift_, coeff_ + rhs.coeff_};
}

FockOp FockOp::operator-(const FockOp& rhs) const { return *this + rhs * -1.0; }

FockOp FockOp::operator*(double s) const { return {dim_, shift_, coeff_ * s}; }

Matrix FockOp::dense() const {
  Matrix m = Matrix::Zero(dim_, dim_);
  for (int n = 0; n < dim_; ++n) {
    const int to = n + shift_;
    if (to >= 0 && to < dim_) m(to, n) = coeff_(n);
  }
  return m;
}

Vector FockOp::apply(const Vector& v) const {
  Vector out = Vector::Zero(dim_);
  for (int n = 0; n < dim_; ++n) {
    const int to = n + shift_;
    if (to >= 0 && to < dim_) out(to) = coeff_(n) * v(n);
  }
  return out;
}

Matrix FockOp::apply_rows(const Matrix& m) const {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int n = 0; n < dim_; ++n) {
    const int to = n + shift_;
    if (to >= 0 && to < dim_ && coeff_(n) != 0.0) out.row(to) = coeff_(n) * m.row(n);
  }
  return out;
}

Matrix FockOp::apply_cols(const Matrix& m) const {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int n = 0; n < dim_; ++n) {
    const int to = n + shift_;
    if (to >= 0 && to < dim_ && coeff_(n) != 0.0) out.col(to) = coeff_(n) * m.col(n);
  }
  return out;
}

}  // namespace twomode
