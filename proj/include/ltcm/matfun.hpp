#pragma once

// phi_0 and phi_1 of a matrix argument:
//   phi_i(A) = sum_l (-1)^l A^l / (2l+i)!,
// so that phi_0(x^2) = cos x and phi_1(x^2) = sin(x)/x.

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "ltcm/errors.hpp"

namespace ltcm {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Terms beyond this count mean the argument is too large for the plain series.
inline constexpr int kMaxSeriesTerms = 200;

/// Largest ||h^2 M||_inf accepted by the matrix-series coefficient path.
inline constexpr double kSeriesNormGuard = 30.0;

/// The pair phi_0(c^2 V), phi_1(c^2 V); argument_scale records c.
template <typename Scalar>
struct PhiPair {
  DenseMatrix<Scalar> phi0;
  DenseMatrix<Scalar> phi1;
  Scalar argument_scale = Scalar(1);
};

/// M = P^T diag(lambda^2) P with P orthogonal; lambda are the square roots
/// of the (clamped) eigenvalues of M.
template <typename Scalar>
struct SpectralDecomposition {
  DenseMatrix<Scalar> P;
  DenseVector<Scalar> lambda;

  Eigen::Index dimension() const { return lambda.size(); }

  DenseMatrix<Scalar> reconstruct() const {
    return P.transpose() * lambda.array().square().matrix().asDiagonal() * P;
  }
};

/// sin(x)/x with a Taylor branch for |x| < 1e-4.
template <typename Scalar>
Scalar sinc(Scalar x) {
  using std::abs;
  using std::sin;
  if (abs(x) < Scalar(1e-4)) {
    const Scalar x2 = x * x;
    return Scalar(1) - x2 / Scalar(6) * (Scalar(1) - x2 / Scalar(20) * (Scalar(1) - x2 / Scalar(42)));
  }
  return sin(x) / x;
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& A) {
  if (A.size() == 0) return typename Derived::Scalar(0);
  return A.cwiseAbs().maxCoeff();
}

/// Induced infinity norm (max absolute row sum).
template <typename Derived>
typename Derived::Scalar inf_norm(const Eigen::MatrixBase<Derived>& A) {
  if (A.size() == 0) return typename Derived::Scalar(0);
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Truncated series for phi_0(A), phi_1(A) from one power ladder.
///
/// Terms are added until the newest term's max-norm drops below
/// tol * (1 + max-norm of the running phi_0). Throws SeriesDivergenceError
/// if that has not happened after kMaxSeriesTerms terms.
template <typename Derived>
PhiPair<typename Derived::Scalar> phi_pair_series(const Eigen::MatrixBase<Derived>& A,
                                                  typename Derived::Scalar tol) {
  using Scalar = typename Derived::Scalar;
  if (A.rows() != A.cols()) throw InvalidArgumentError("phi_pair_series: matrix must be square");
  if (!(tol > Scalar(0))) throw InvalidArgumentError("phi_pair_series: tol must be positive");
  const Eigen::Index d = A.rows();

  PhiPair<Scalar> out;
  out.phi0 = DenseMatrix<Scalar>::Identity(d, d);
  out.phi1 = DenseMatrix<Scalar>::Identity(d, d);
  // term = (-A)^l / (2l)!
  DenseMatrix<Scalar> term = DenseMatrix<Scalar>::Identity(d, d);
  for (int l = 1; l <= kMaxSeriesTerms; ++l) {
    term = (term * A).eval() * (Scalar(-1) / (Scalar(2 * l - 1) * Scalar(2 * l)));
    out.phi0 += term;
    out.phi1 += term / Scalar(2 * l + 1);
    if (max_abs(term) < tol * (Scalar(1) + max_abs(out.phi0))) return out;
  }
  throw SeriesDivergenceError("phi_pair_series: no convergence within " + std::to_string(kMaxSeriesTerms) +
                              " terms; the argument norm is too large for the series path");
}

/// Symmetric eigendecomposition M = P^T diag(lambda^2) P.
///
/// Requires symmetry to 1e-12 relative (AsymmetricMatrixError otherwise, the
/// caller should use the series path) and eigenvalues >= -1e-10 ||M||; small
/// negative eigenvalues are clamped to zero.
template <typename Derived>
SpectralDecomposition<typename Derived::Scalar> decompose_symmetric(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (M.rows() != M.cols()) throw InvalidArgumentError("decompose_symmetric: matrix must be square");
  const Scalar scale = std::max(Scalar(1), max_abs(M));
  if (max_abs(M - M.transpose()) > Scalar(1e-12) * scale) {
    throw AsymmetricMatrixError("decompose_symmetric: matrix is not symmetric; use the series path");
  }
  const DenseMatrix<Scalar> sym = (M + M.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success) throw Error("decompose_symmetric: eigensolver failed");

  const auto& eig = solver.eigenvalues();
  SpectralDecomposition<Scalar> sd;
  sd.P = solver.eigenvectors().transpose();
  sd.lambda.resize(eig.size());
  const Scalar floor = -Scalar(1e-10) * std::max(Scalar(1), max_abs(M));
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    if (eig(k) < floor) throw AsymmetricMatrixError("decompose_symmetric: matrix is not positive semi-definite");
    sd.lambda(k) = eig(k) > Scalar(0) ? sqrt(eig(k)) : Scalar(0);
  }
  return sd;
}

/// phi_0 = P^T diag(cos(scale lambda)) P, phi_1 = P^T diag(sinc(scale lambda)) P.
template <typename Scalar>
PhiPair<Scalar> phi_pair_spectral(const SpectralDecomposition<Scalar>& sd, Scalar scale) {
  using std::cos;
  if (scale < Scalar(0)) throw InvalidArgumentError("phi_pair_spectral: scale must be non-negative");
  const Eigen::Index d = sd.dimension();
  DenseVector<Scalar> c(d), s(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Scalar x = scale * sd.lambda(k);
    c(k) = cos(x);
    s(k) = sinc(x);
  }
  PhiPair<Scalar> out;
  out.phi0 = sd.P.transpose() * c.asDiagonal() * sd.P;
  out.phi1 = sd.P.transpose() * s.asDiagonal() * sd.P;
  out.argument_scale = scale;
  return out;
}

}  // namespace ltcm
