#pragma once

// Lagrange basis polynomials on collocation nodes in [0,1], stored in
// monomial form so that derivatives of any order and moments against
// (1-z)^n are exact polynomial operations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ltcm/errors.hpp"

namespace ltcm {

/// Largest number of nodes supported by the coefficient machinery.
inline constexpr std::size_t kMaxNodes = 8;

/// l_j in monomial form: l_j(x) = sum_m coefficients[m] x^m, degree s-1.
template <typename Scalar>
struct BasisPolynomial {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::size_t index = 0;
  Vector coefficients;

  std::size_t degree() const { return static_cast<std::size_t>(coefficients.size()) - 1; }
};

/// Distinct collocation nodes c_1..c_s together with their Lagrange basis.
///
/// Indices are zero-based throughout the library: basis(j) is l_{j+1} in
/// the usual one-based notation.
template <typename Scalar>
class BasicNodeSet {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicNodeSet(std::vector<Scalar> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw InvalidNodesError("node set must contain at least one node");
    if (nodes_.size() > kMaxNodes) {
      throw InvalidNodesError("at most " + std::to_string(kMaxNodes) + " nodes are supported");
    }
    for (std::size_t a = 0; a < nodes_.size(); ++a) {
      const Scalar c = nodes_[a];
      if (!(c >= Scalar(0) && c <= Scalar(1))) throw InvalidNodesError("nodes must lie in [0,1]");
      for (std::size_t b = 0; b < a; ++b) {
        if (nodes_[b] == c) throw InvalidNodesError("nodes must be pairwise distinct");
      }
    }
    basis_.reserve(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) basis_.push_back(expand(j));
  }

  std::size_t size() const { return nodes_.size(); }
  Scalar node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Scalar>& nodes() const { return nodes_; }
  const BasisPolynomial<Scalar>& basis(std::size_t j) const { return basis_.at(j); }

  /// Smallest pairwise distance between nodes (infinity for s = 1).
  Scalar min_gap() const {
    Scalar gap = std::numeric_limits<Scalar>::infinity();
    for (std::size_t a = 0; a < nodes_.size(); ++a)
      for (std::size_t b = 0; b < a; ++b) gap = std::min(gap, Scalar(std::abs(nodes_[a] - nodes_[b])));
    return gap;
  }

 private:
  BasisPolynomial<Scalar> expand(std::size_t j) const {
    Vector poly = Vector::Zero(static_cast<Eigen::Index>(nodes_.size()));
    poly(0) = Scalar(1);
    Eigen::Index deg = 0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      if (k == j) continue;
      const Scalar denom = nodes_[j] - nodes_[k];
      // multiply by (x - c_k) / (c_j - c_k)
      for (Eigen::Index m = deg + 1; m >= 0; --m) {
        const Scalar shifted = m > 0 ? poly(m - 1) : Scalar(0);
        const Scalar same = m <= deg ? poly(m) : Scalar(0);
        poly(m) = (shifted - nodes_[k] * same) / denom;
      }
      ++deg;
    }
    return {j, std::move(poly)};
  }

  std::vector<Scalar> nodes_;
  std::vector<BasisPolynomial<Scalar>> basis_;
};

using NodeSet = BasicNodeSet<double>;

inline NodeSet build_node_set(std::vector<double> nodes) { return NodeSet(std::move(nodes)); }

/// Two-point Gauss-Legendre nodes on [0,1]: (3 -+ sqrt 3) / 6.
template <typename Scalar = double>
BasicNodeSet<Scalar> gauss_legendre_2() {
  using std::sqrt;
  const Scalar r3 = sqrt(Scalar(3));
  return BasicNodeSet<Scalar>({(Scalar(3) - r3) / Scalar(6), (Scalar(3) + r3) / Scalar(6)});
}

/// Horner evaluation of a monomial coefficient vector.
template <typename Derived>
typename Derived::Scalar eval_monomial(const Eigen::MatrixBase<Derived>& coeffs, typename Derived::Scalar x) {
  using Scalar = typename Derived::Scalar;
  Scalar acc(0);
  for (Eigen::Index m = coeffs.size() - 1; m >= 0; --m) acc = acc * x + coeffs(m);
  return acc;
}

/// Monomial coefficients of the k-th derivative of l_j (the zero polynomial
/// when k exceeds the degree).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> derivative_coefficients(const BasicNodeSet<Scalar>& ns, std::size_t j,
                                                                   std::size_t k) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Vector& a = ns.basis(j).coefficients;
  const auto n = static_cast<std::size_t>(a.size());
  if (k >= n) return Vector::Zero(1);
  Vector d(static_cast<Eigen::Index>(n - k));
  for (std::size_t m = 0; m < n - k; ++m) {
    Scalar falling(1);
    for (std::size_t r = m + 1; r <= m + k; ++r) falling *= Scalar(r);
    d(static_cast<Eigen::Index>(m)) = a(static_cast<Eigen::Index>(m + k)) * falling;
  }
  return d;
}

/// l_j(x). x is not restricted to [0,1].
template <typename Scalar>
Scalar eval_basis(const BasicNodeSet<Scalar>& ns, std::size_t j, Scalar x) {
  return eval_monomial(ns.basis(j).coefficients, x);
}

/// k-th derivative of l_j at x; zero for k > s-1.
template <typename Scalar>
Scalar eval_basis_derivative(const BasicNodeSet<Scalar>& ns, std::size_t j, std::size_t k, Scalar x) {
  return eval_monomial(derivative_coefficients(ns, j, k), x);
}

/// int_0^1 z^m (1-z)^n dz = m! n! / (m+n+1)!, evaluated without factorials.
template <typename Scalar>
Scalar beta_moment(std::size_t m, std::size_t n) {
  Scalar value = Scalar(1) / Scalar(n + 1);
  for (std::size_t r = 1; r <= m; ++r) value *= Scalar(r) / Scalar(n + 1 + r);
  return value;
}

/// int_0^1 l_j(scale * z) (1-z)^n dz, exact.
template <typename Scalar>
Scalar basis_moment(const BasicNodeSet<Scalar>& ns, std::size_t j, Scalar scale, std::size_t n) {
  const auto& a = ns.basis(j).coefficients;
  Scalar sum(0);
  Scalar power(1);
  for (Eigen::Index m = 0; m < a.size(); ++m) {
    sum += a(m) * power * beta_moment<Scalar>(static_cast<std::size_t>(m), n);
    power *= scale;
  }
  return sum;
}

/// max over i,j of int_0^1 |l_j(c_i z)(1-z)| dz.
///
/// l_j(c_i z) vanishes exactly at z = c_k / c_i (k != j), so [0,1] is split
/// at those points and each sign-constant piece is integrated exactly.
template <typename Scalar>
Scalar abs_weight_bound(const BasicNodeSet<Scalar>& ns) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const std::size_t s = ns.size();
  Scalar best(0);
  for (std::size_t i = 0; i < s; ++i) {
    const Scalar ci = ns.node(i);
    for (std::size_t j = 0; j < s; ++j) {
      const Vector& a = ns.basis(j).coefficients;
      // g(z) = l_j(c_i z) (1 - z), then its antiderivative G with G(0) = 0
      Vector g = Vector::Zero(a.size() + 1);
      Scalar power(1);
      for (Eigen::Index m = 0; m < a.size(); ++m) {
        g(m) += a(m) * power;
        g(m + 1) -= a(m) * power;
        power *= ci;
      }
      Vector G = Vector::Zero(g.size() + 1);
      for (Eigen::Index m = 0; m < g.size(); ++m) G(m + 1) = g(m) / Scalar(m + 1);

      std::vector<Scalar> cuts{Scalar(0), Scalar(1)};
      if (ci > Scalar(0)) {
        for (std::size_t k = 0; k < s; ++k) {
          if (k == j) continue;
          const Scalar root = ns.node(k) / ci;
          if (root > Scalar(0) && root < Scalar(1)) cuts.push_back(root);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      Scalar total(0);
      for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
        total += std::abs(eval_monomial(G, cuts[p + 1]) - eval_monomial(G, cuts[p]));
      }
      best = std::max(best, total);
    }
  }
  return best;
}

}  // namespace ltcm
