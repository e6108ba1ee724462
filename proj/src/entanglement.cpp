#include "twomode/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace twomode {

namespace {

constexpr double kRankFloor = 1e-15;

Matrix sigma_yy() {
  Matrix y = Matrix::Zero(4, 4);
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  return y;
}

void require_two_qubits(const Matrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw std::invalid_argument("concurrence needs a 4x4 two-qubit density matrix");
  }
}

double combine(std::vector<double> s) {
  std::sort(s.begin(), s.end(), std::greater<>());
  return std::max(0.0, s[0] - s[1] - s[2] - s[3]);
}

double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace

std::string to_string(Measure m) {
  switch (m) {
    case Measure::Concurrence: return "concurrence";
    case Measure::EoF: return "eof";
    case Measure::Negativity: return "negativity";
  }
  return "?";
}

double concurrence(const Matrix& rho) {
  require_two_qubits(rho);
  const Matrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector& w = es.eigenvalues();
  if (w.minCoeff() < -Tolerances::psd) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << w.minCoeff();
    throw NumericalError(os.str());
  }
  Matrix factor = Matrix::Zero(4, 4);
  Index cols = 0;
  for (Index k = 0; k < 4; ++k) {
    if (w(k) > kRankFloor) factor.col(cols++) = std::sqrt(w(k)) * es.eigenvectors().col(k);
  }
  if (cols == 0) return 0.0;
  const Matrix wk = factor.leftCols(cols);
  const Matrix tau = wk.transpose() * sigma_yy() * wk;
  const RealVector sv = Eigen::JacobiSVD<Matrix>(tau).singularValues();
  std::vector<double> s(4, 0.0);
  for (Index k = 0; k < sv.size(); ++k) s[k] = sv(k);
  return std::min(1.0, combine(s));
}

double concurrence(const DensityMatrix& rho) { return concurrence(rho.matrix()); }

double concurrence_eigen(const Matrix& rho) {
  require_two_qubits(rho);
  const Matrix y = sigma_yy();
  const Matrix tilde = y * rho.conjugate() * y;
  Eigen::ComplexEigenSolver<Matrix> es(rho * tilde);
  std::vector<double> s;
  for (Index k = 0; k < 4; ++k) {
    const cplx l = es.eigenvalues()(k);
    if (std::abs(l.imag()) > 1e-10) throw NumericalError("rho rho~ has a complex eigenvalue");
    if (l.real() < -Tolerances::psd) throw NumericalError("rho rho~ has a negative eigenvalue");
    s.push_back(std::sqrt(std::max(0.0, l.real())));
  }
  return combine(s);
}

double eof(double c) {
  if (!(c >= -1e-12 && c <= 1.0 + 1e-12)) throw std::invalid_argument("eof: C must lie in [0, 1]");
  c = std::clamp(c, 0.0, 1.0);
  return binary_entropy(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

double negativity(const DensityMatrix& rho, const std::vector<std::string>& part) {
  const SpaceLayout& l = rho.layout();
  if (part.empty() || part.size() >= l.size()) {
    throw std::invalid_argument("negativity: bipartition must be a nonempty proper subset");
  }
  for (std::size_t i = 0; i < part.size(); ++i) {
    if (!l.contains(part[i])) throw std::invalid_argument("negativity: unknown label " + part[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (part[i] == part[j]) throw std::invalid_argument("negativity: repeated label " + part[i]);
    }
  }
  const Operator pt = partial_transpose(rho, part);
  const Matrix h = 0.5 * (pt.matrix + pt.matrix.adjoint());
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  double n = 0.0;
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < 0.0) n -= ev(k);
  }
  return n;
}

double negativity_atoms(const Matrix& rho) {
  require_two_qubits(rho);
  const Matrix pt = partial_transpose(rho, SpaceLayout({2, 2}, {"atom1", "atom2"}), 1);
  const Matrix h = 0.5 * (pt + pt.adjoint());
  const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  double n = 0.0;
  for (Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < 0.0) n -= ev(k);
  }
  return n;
}

MeasureResult measure(const DensityMatrix& rho, Measure m, const std::vector<std::string>& part) {
  MeasureResult r;
  r.measure = m;
  const auto& labels = rho.layout().labels();
  switch (m) {
    case Measure::Concurrence:
    case Measure::EoF: {
      if (rho.layout().dims() != std::vector<int>{2, 2}) {
        throw std::invalid_argument("concurrence needs a two-qubit layout");
      }
      const double c = concurrence(rho);
      r.value = m == Measure::EoF ? eof(c) : c;
      r.bipartition = labels[0] + "|" + labels[1];
      break;
    }
    case Measure::Negativity: {
      const std::vector<std::string> b = part.empty() ? std::vector<std::string>{labels.back()} : part;
      r.value = negativity(rho, b);
      std::string left, right;
      for (const auto& l : labels) {
        const bool in_b = std::find(b.begin(), b.end(), l) != b.end();
        std::string& side = in_b ? right : left;
        side += (side.empty() ? "" : ",") + l;
      }
      r.bipartition = left + "|" + right;
      break;
    }
  }
  return r;
}

SmallSqueezingNegativities small_squeezing_negativities(double xi, double gt) {
  const double s1 = std::sin(std::numbers::sqrt2 * gt);
  const double c1 = std::cos(std::numbers::sqrt2 * gt);
  const double c2 = std::cos(2.0 * gt);
  const double base = s1 * s1 * c1 * c1;
  return {std::abs(std::min(base - xi * s1 * s1 * c2 * c2, 0.0)),
          std::abs(std::min(base - xi * c1 * c1 * c2 * c2, 0.0))};
}

}  // namespace twomode
