#pragma once

// Coefficients of the trigonometric collocation method:
//
//   I1_j      = int_0^1 l_j(z) (1-z) phi_1((1-z)^2 V) dz
//   I2_j      = int_0^1 l_j(z) phi_0((1-z)^2 V) dz
//   Itilde_ij = int_0^1 l_j(c_i z) (1-z) phi_1((1-z)^2 c_i^2 V) dz
//
// For a scalar V = lambda^2 these reduce to sine/cosine integrals against a
// polynomial. Three independent evaluations are provided: a closed form by
// repeated integration by parts (accurate for large arguments), a power series
// in V (accurate for small arguments) and adaptive quadrature (oracle only).

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ltcm/errors.hpp"
#include "ltcm/lagrange.hpp"
#include "ltcm/matfun.hpp"

namespace ltcm {

enum class KernelKind { I1, I2, Itilde };

const char* to_string(KernelKind kind);

template <typename Scalar>
struct ScalarKernelResult {
  Scalar value = Scalar(0);
  Scalar lambda = Scalar(0);
  KernelKind kind = KernelKind::I1;
  std::size_t j = 0;
  std::size_t i = 0;  // stage index, meaningful for Itilde only
};

/// Argument below which the integration-by-parts closed form loses accuracy
/// and the series is used instead. The closed form divides by mu^(2k+2) for
/// derivative orders up to s-1, so the switch grows with s.
inline double recursion_switch(std::size_t s) {
  constexpr double kSwitch[kMaxNodes + 1] = {0.5, 0.5, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 5.0};
  return kSwitch[s < kMaxNodes ? s : kMaxNodes];
}

namespace detail {

// Argument that controls accuracy: lambda for I1/I2, c_i lambda for Itilde.
template <typename Scalar>
Scalar effective_argument(const BasicNodeSet<Scalar>& ns, KernelKind kind, std::size_t i, Scalar lambda) {
  return kind == KernelKind::Itilde ? ns.node(i) * lambda : lambda;
}

template <typename Scalar>
void check_indices(const BasicNodeSet<Scalar>& ns, KernelKind kind, std::size_t j, std::size_t i) {
  if (j >= ns.size() || (kind == KernelKind::Itilde && i >= ns.size())) {
    throw InvalidArgumentError("scalar kernel: basis or stage index out of range");
  }
}

// k-th derivative of g(z) = l_j(scale * z) at z.
template <typename Scalar>
Scalar scaled_derivative(const BasicNodeSet<Scalar>& ns, std::size_t j, Scalar scale, std::size_t k, Scalar z) {
  using std::pow;
  return pow(scale, Scalar(k)) * eval_basis_derivative(ns, j, k, scale * z);
}

}  // namespace detail

/// Closed form by repeated integration by parts.
///
/// With g = l_j (I1, I2) or g(z) = l_j(c_i z) (Itilde) and mu the effective
/// argument, int g(z) sin((1-z) mu) / mu dz and int g(z) cos((1-z) mu) dz are
///   sum_k (-1)^k / mu^(2k+2) (g^(2k)(1) - g^(2k)(0) cos mu - g^(2k+1)(0) sin(mu) / mu)
///   sum_k (-1)^k / mu^(2k+1) (g^(2k)(0) sin mu + (g^(2k+1)(1) - g^(2k+1)(0) cos mu) / mu)
/// Throws KernelDomainError if mu <= recursion_switch(s).
template <typename Scalar>
ScalarKernelResult<Scalar> scalar_kernel_recursion(const BasicNodeSet<Scalar>& ns, KernelKind kind, std::size_t j,
                                                   Scalar lambda, std::size_t i = 0) {
  using std::cos;
  using std::sin;
  detail::check_indices(ns, kind, j, i);
  const Scalar mu = detail::effective_argument(ns, kind, i, lambda);
  if (!(mu > Scalar(recursion_switch(ns.size())))) {
    throw KernelDomainError("scalar_kernel_recursion: argument below the recursion switch; use the series kernel");
  }
  const Scalar scale = kind == KernelKind::Itilde ? ns.node(i) : Scalar(1);
  const std::size_t deg = ns.size() - 1;
  const Scalar cm = cos(mu);
  const Scalar sm = sin(mu);
  auto g = [&](std::size_t k, Scalar z) { return detail::scaled_derivative(ns, j, scale, k, z); };

  Scalar sum(0);
  Scalar sign(1);
  Scalar mu_pow = mu;  // mu^(2k+1)
  for (std::size_t k = 0; 2 * k <= deg; ++k) {
    if (kind == KernelKind::I2) {
      sum += sign / mu_pow * (g(2 * k, Scalar(0)) * sm + (g(2 * k + 1, Scalar(1)) - g(2 * k + 1, Scalar(0)) * cm) / mu);
    } else {
      sum += sign / (mu_pow * mu) * (g(2 * k, Scalar(1)) - g(2 * k, Scalar(0)) * cm - g(2 * k + 1, Scalar(0)) * sm / mu);
    }
    sign = -sign;
    mu_pow *= mu * mu;
  }
  return {sum, lambda, kind, j, i};
}

/// Power series in V = lambda^2:
///   I1     = sum_l (-V)^l / (2l+1)! int l_j(z) (1-z)^(2l+1) dz
///   I2     = sum_l (-V)^l / (2l)!   int l_j(z) (1-z)^(2l) dz
///   Itilde = sum_l (-c_i^2 V)^l / (2l+1)! int l_j(c_i z) (1-z)^(2l+1) dz
/// For s <= 2 the moments equal l_j(1/(2l+3))/(2l+2), l_j(1/(2l+2))/(2l+1)
/// and l_j(c_i/(2l+3))/(2l+2). Throws SeriesDivergenceError when the
/// effective V exceeds kSeriesNormGuard.
template <typename Scalar>
ScalarKernelResult<Scalar> scalar_kernel_series(const BasicNodeSet<Scalar>& ns, KernelKind kind, std::size_t j,
                                                Scalar lambda_sq, std::size_t i = 0) {
  using std::abs;
  using std::sqrt;
  detail::check_indices(ns, kind, j, i);
  if (lambda_sq < Scalar(0)) throw InvalidArgumentError("scalar_kernel_series: lambda^2 must be non-negative");
  const Scalar scale = kind == KernelKind::Itilde ? ns.node(i) : Scalar(1);
  const Scalar v = scale * scale * lambda_sq;
  if (v > Scalar(kSeriesNormGuard)) {
    throw SeriesDivergenceError("scalar_kernel_series: argument exceeds the series guard");
  }
  const Scalar tol = std::numeric_limits<Scalar>::epsilon() * Scalar(1e-2);
  Scalar term(1);  // (-v)^l / (2l)!
  Scalar sum(0);
  for (int l = 0; l <= kMaxSeriesTerms; ++l) {
    if (l > 0) term *= -v / (Scalar(2 * l - 1) * Scalar(2 * l));
    const auto n = static_cast<std::size_t>(2 * l);
    if (kind == KernelKind::I2) {
      sum += term * basis_moment(ns, j, scale, n);
    } else {
      sum += term / Scalar(2 * l + 1) * basis_moment(ns, j, scale, n + 1);
    }
    if (abs(term) < tol) return {sum, sqrt(lambda_sq), kind, j, i};
  }
  throw SeriesDivergenceError("scalar_kernel_series: no convergence");
}

/// lambda = 0: the kernels reduce to exact polynomial integrals
/// int l_j(z)(1-z) dz, int l_j(z) dz and int l_j(c_i z)(1-z) dz.
template <typename Scalar>
Scalar scalar_kernel_polynomial(const BasicNodeSet<Scalar>& ns, KernelKind kind, std::size_t j, std::size_t i = 0) {
  detail::check_indices(ns, kind, j, i);
  switch (kind) {
    case KernelKind::I1: return basis_moment(ns, j, Scalar(1), 1);
    case KernelKind::I2: return basis_moment(ns, j, Scalar(1), 0);
    case KernelKind::Itilde: return basis_moment(ns, j, ns.node(i), 1);
  }
  return Scalar(0);
}

/// Picks the polynomial, series or recursion form for a given lambda >= 0.
template <typename Scalar>
Scalar scalar_kernel(const BasicNodeSet<Scalar>& ns, KernelKind kind, std::size_t j, Scalar lambda,
                     std::size_t i = 0) {
  if (lambda < Scalar(0)) throw InvalidArgumentError("scalar_kernel: lambda must be non-negative");
  if (lambda == Scalar(0)) return scalar_kernel_polynomial(ns, kind, j, i);
  const Scalar mu = detail::effective_argument(ns, kind, i, lambda);
  if (mu > Scalar(recursion_switch(ns.size()))) return scalar_kernel_recursion(ns, kind, j, lambda, i).value;
  return scalar_kernel_series(ns, kind, j, lambda * lambda, i).value;
}

/// Adaptive Gauss-Kronrod quadrature of the defining integral for scalar
/// V >= 0 (independent of the closed forms above).
double quadrature_oracle(const NodeSet& ns, KernelKind kind, std::size_t j, std::size_t i, double V);

/// Butcher-like tableau of the M = 0 method in its printed form:
/// Abar_ij = l_j(c_i/3)/2, bbar_j = l_j(1/3)/2, b_j = l_j(1/2).
/// These equal the exact moments for s <= 2 only.
template <typename Scalar>
struct RknTableau {
  DenseMatrix<Scalar> Abar;
  DenseVector<Scalar> bbar;
  DenseVector<Scalar> b;
};

template <typename Scalar>
RknTableau<Scalar> rkn_tableau(const BasicNodeSet<Scalar>& ns) {
  const auto s = static_cast<Eigen::Index>(ns.size());
  RknTableau<Scalar> t{DenseMatrix<Scalar>(s, s), DenseVector<Scalar>(s), DenseVector<Scalar>(s)};
  for (Eigen::Index j = 0; j < s; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    t.bbar(j) = eval_basis(ns, ju, Scalar(1) / Scalar(3)) / Scalar(2);
    t.b(j) = eval_basis(ns, ju, Scalar(1) / Scalar(2));
    for (Eigen::Index i = 0; i < s; ++i) {
      t.Abar(i, j) = eval_basis(ns, ju, ns.node(static_cast<std::size_t>(i)) / Scalar(3)) / Scalar(2);
    }
  }
  return t;
}

enum class CoefficientPath { spectral, series };

const char* to_string(CoefficientPath path);

/// Precomputed method data for one (nodes, M, h). Immutable once built.
struct CoefficientTable {
  NodeSet nodes;
  Eigen::MatrixXd M;
  double h = 0.0;
  CoefficientPath path = CoefficientPath::spectral;

  std::vector<Eigen::MatrixXd> I1;                   // [j]
  std::vector<Eigen::MatrixXd> I2;                   // [j]
  std::vector<std::vector<Eigen::MatrixXd>> Itilde;  // [i][j]
  PhiPair<double> phi_main;                          // phi(V)
  std::vector<PhiPair<double>> phi_stage;            // phi(c_i^2 V)
  Eigen::MatrixXd M_phi1;                            // M phi_1(V)

  Eigen::Index dimension() const { return M.rows(); }
  std::size_t stages() const { return nodes.size(); }
};

/// Symmetric PSD M = P^T W^2 P: every coefficient is P^T diag(kernel(h lambda_k)) P.
CoefficientTable build_table_spectral(const NodeSet& ns, const SpectralDecomposition<double>& sd, double h);

/// Matrix power series in V = h^2 M; any square M with ||V||_inf <= kSeriesNormGuard.
CoefficientTable build_table_series(const NodeSet& ns, const Eigen::MatrixXd& M, double h);

}  // namespace ltcm
