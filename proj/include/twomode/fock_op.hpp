// Single-mode operators of the form  sum_n c_n |n+shift><n|  on a truncated Fock space.
//
// Every operator-valued entry of the closed-form propagators is a product of ladder
// operators and functions of the number operator, which stays inside this family; products
// and sums are exact and cost O(dim).
#pragma once

#include "twomode/types.hpp"

#include <functional>

namespace twomode {

class FockOp {
 public:
  FockOp(int dim, int shift, RealVector coeff);

  static FockOp zero(int dim, int shift = 0);
  static FockOp identity(int dim);
  /// diag(f(0), ..., f(dim-1)); `f` receives the Fock index.
  static FockOp diagonal(int dim, const std::function<double(int)>& f);
  static FockOp lower(int dim);  // a
  static FockOp raise(int dim);  // a^dagger

  int dim() const { return dim_; }
  int shift() const { return shift_; }
  /// Coefficient on source state n (zero when n + shift falls outside the space).
  const RealVector& coeff() const { return coeff_; }

  FockOp operator*(const FockOp& rhs) const;
  FockOp operator+(const FockOp& rhs) const;
  FockOp operator-(const FockOp& rhs) const;
  FockOp operator*(double s) const;

  Matrix dense() const;
  Vector apply(const Vector& v) const;
  /// op * m  (acts on row indices).
  Matrix apply_rows(const Matrix& m) const;
  /// m * op^T  (acts on column indices).
  Matrix apply_cols(const Matrix& m) const;

 private:
  int dim_;
  int shift_;
  RealVector coeff_;
};

}  // namespace twomode
