#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ltcm/lagrange.hpp"

using namespace ltcm;

namespace {

// Composite Simpson on n panels; |l_j(c_i z)(1-z)| has kinks, so n is large.
template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int k = 1; k < n; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("gauss-legendre 2 nodes") {
  const auto ns = gauss_legendre_2();
  CHECK(ns.size() == 2);
  CHECK(ns.node(0) == doctest::Approx(0.5 - std::sqrt(3.0) / 6.0).epsilon(1e-15));
  CHECK(ns.node(1) == doctest::Approx(0.5 + std::sqrt(3.0) / 6.0).epsilon(1e-15));
  CHECK(ns.min_gap() == doctest::Approx(std::sqrt(3.0) / 3.0));
}

TEST_CASE("cardinal property and partition of unity") {
  const NodeSet ns({0.05, 0.3, 0.55, 0.9});
  for (std::size_t j = 0; j < ns.size(); ++j) {
    for (std::size_t k = 0; k < ns.size(); ++k) {
      CHECK(eval_basis(ns, j, ns.node(k)) == doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-13));
    }
  }
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int n = 0; n < 50; ++n) {
    const double x = u(rng);
    double sum = 0.0;
    for (std::size_t j = 0; j < ns.size(); ++j) sum += eval_basis(ns, j, x);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("interpolation reproduces polynomials up to degree s-1") {
  const NodeSet ns({0.1, 0.4, 0.7});
  auto p = [](double x) { return 2.0 - 3.0 * x + 0.5 * x * x; };
  for (double x : {-0.3, 0.0, 0.25, 0.8, 1.0, 1.7}) {
    double v = 0.0;
    for (std::size_t j = 0; j < ns.size(); ++j) v += p(ns.node(j)) * eval_basis(ns, j, x);
    CHECK(v == doctest::Approx(p(x)).epsilon(1e-13));
  }
}

TEST_CASE("derivatives agree with central differences") {
  const NodeSet ns({0.0, 0.35, 0.6, 1.0});
  const double d = 1e-5;
  for (std::size_t j = 0; j < ns.size(); ++j) {
    for (double x : {0.1, 0.5, 0.77}) {
      const double fd = (eval_basis(ns, j, x + d) - eval_basis(ns, j, x - d)) / (2 * d);
      CHECK(eval_basis_derivative(ns, j, 1, x) == doctest::Approx(fd).epsilon(1e-8));
      const double fd2 = (eval_basis_derivative(ns, j, 1, x + d) - eval_basis_derivative(ns, j, 1, x - d)) / (2 * d);
      CHECK(eval_basis_derivative(ns, j, 2, x) == doctest::Approx(fd2).epsilon(1e-7));
    }
    CHECK(eval_basis_derivative(ns, j, 4, 0.3) == 0.0);
  }
}

TEST_CASE("beta moments") {
  CHECK(beta_moment<double>(0, 0) == doctest::Approx(1.0));
  CHECK(beta_moment<double>(2, 3) == doctest::Approx(2.0 * 6.0 / 720.0));
  CHECK(beta_moment<double>(5, 1) == doctest::Approx(1.0 / 42.0));
}

TEST_CASE("basis moments match numerical integration") {
  const NodeSet ns({0.2, 0.5, 0.95});
  for (std::size_t j = 0; j < ns.size(); ++j) {
    for (double scale : {1.0, 0.5}) {
      for (std::size_t n : {0, 1, 4}) {
        const double ref = simpson(
            [&](double z) { return eval_basis(ns, j, scale * z) * std::pow(1.0 - z, double(n)); }, 0.0, 1.0, 2000);
        CHECK(basis_moment(ns, j, scale, n) == doctest::Approx(ref).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("absolute weight bound for Gauss-2") {
  const auto ns = gauss_legendre_2();
  // max over (i, j) of int_0^1 |l_j(c_i z)(1-z)| dz, attained at (1, 1) in
  // one-based indexing; high-precision reference value.
  CHECK(abs_weight_bound(ns) == doctest::Approx(0.62200846792814621559).epsilon(1e-14));

  double simpson_max = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double v = simpson(
          [&](double z) { return std::abs(eval_basis(ns, j, ns.node(i) * z) * (1.0 - z)); }, 0.0, 1.0, 200000);
      simpson_max = std::max(simpson_max, v);
    }
  }
  CHECK(abs_weight_bound(ns) == doctest::Approx(simpson_max).epsilon(1e-9));
}

TEST_CASE("absolute weight bound is permutation invariant") {
  const NodeSet a({0.1, 0.45, 0.8});
  const NodeSet b({0.8, 0.1, 0.45});
  CHECK(abs_weight_bound(a) == doctest::Approx(abs_weight_bound(b)).epsilon(1e-14));
}

TEST_CASE("invalid node sets") {
  CHECK_THROWS_AS(NodeSet(std::vector<double>{}), InvalidNodesError);
  CHECK_THROWS_AS(NodeSet({0.2, 0.2}), InvalidNodesError);
  CHECK_THROWS_AS(NodeSet({-0.1, 0.5}), InvalidNodesError);
  CHECK_THROWS_AS(NodeSet({0.5, 1.01}), InvalidNodesError);
  CHECK_THROWS_AS(NodeSet({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}), InvalidNodesError);
  CHECK_NOTHROW(NodeSet({0.0, 1.0}));
}
