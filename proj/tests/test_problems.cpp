#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ltcm/matfun.hpp"
#include "ltcm/problems.hpp"

using namespace ltcm;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Largest relative deviation of f from -grad U (central differences) over
// 20 random states around q0.
double gradient_mismatch(const ProblemSpec& spec, double spread, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto& U = *spec.potential;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    VectorXd q = spec.ivp.q0;
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) += spread * u(rng) * (1.0 + std::abs(q(i)));
    const VectorXd f = spec.ivp.force(0.0, q);
    VectorXd fd(q.size());
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      const double d = 1e-6 * (1.0 + std::abs(q(i)));
      VectorXd a = q, b = q;
      a(i) += d;
      b(i) -= d;
      fd(i) = -(U(a) - U(b)) / (2.0 * d);
    }
    worst = std::max(worst, max_abs(f - fd) / std::max(1e-300, max_abs(fd)));
  }
  return worst;
}

double energy_drift(const ProblemSpec& spec, double h, double t_end = 1.0) {
  SolverConfig cfg;
  cfg.h = h;
  cfg.tol = 1e-15;
  cfg.max_iter = 100;
  auto ivp = spec.ivp;
  ivp.t_end = t_end;
  const auto traj = solve(ivp, gauss_legendre_2(), cfg);
  double m = 0.0;
  for (double e : traj.energy) m = std::max(m, std::abs(e - traj.energy.front()) / std::max(1.0, std::abs(traj.energy.front())));
  return m;
}

}  // namespace

TEST_CASE("satellite") {
  const auto sat = satellite_problem();
  CHECK(sat.ivp.dimension() == 4);
  const double r0 = sat.parameters.at("r0");
  CHECK(sat.ivp.q0.norm() == doctest::Approx(std::sqrt(r0 / 2.0) * std::sqrt(1.0 + 0.75 + 0.25)).epsilon(1e-14));
  const double kappa = sat.parameters.at("kappa");
  CHECK(max_abs(sat.ivp.M - 0.5 * kappa * MatrixXd::Identity(4, 4)) == 0.0);
  CHECK(kappa > 0.0);
  CHECK(gradient_mismatch(sat, 0.0, 1) <= 1e-6);
  CHECK(gradient_mismatch(sat, 0.2, 2) <= 1e-5);
  CHECK(std::isfinite((*sat.ivp.hamiltonian)(sat.ivp.q0, sat.ivp.p0)));
  // q0 and p0 are antiparallel, so the harmonic part is a radial line through
  // the origin: r = q^T q vanishes at omega s = atan(|q0| omega / |p0|).
  CHECK(sat.ivp.q0.dot(sat.ivp.p0) == doctest::Approx(-sat.ivp.q0.norm() * sat.ivp.p0.norm()).epsilon(1e-14));
  const double omega = std::sqrt(0.5 * kappa);
  const double collision = std::atan(sat.ivp.q0.norm() * omega / sat.ivp.p0.norm()) / omega;
  CHECK(collision == doctest::Approx(0.2013).epsilon(1e-3));
  CHECK(energy_drift(sat, 1.0 / 1024.0, 0.15) <= 1e-8);
}

TEST_CASE("fpu") {
  const auto fpu = fpu_problem(100.0, 3);
  CHECK(fpu.ivp.dimension() == 6);
  auto lam = decompose_symmetric(fpu.ivp.M).lambda;
  std::sort(lam.data(), lam.data() + lam.size());
  CHECK(max_abs(lam.head(3)) <= 1e-12);
  CHECK(max_abs(lam.tail(3) - VectorXd::Constant(3, 100.0)) <= 1e-10);
  CHECK(fpu.ivp.q0(0) == 1.0);
  CHECK(fpu.ivp.q0(3) == 0.01);
  CHECK(fpu.ivp.p0(0) == 1.0);
  CHECK(fpu.ivp.p0(3) == 1.0);
  CHECK(max_abs(fpu.ivp.force(0.0, VectorXd::Zero(6))) == 0.0);
  CHECK(gradient_mismatch(fpu, 0.0, 3) <= 1e-6);
  CHECK(gradient_mismatch(fpu, 0.5, 4) <= 1e-5);
  CHECK(energy_drift(fpu, 1.0 / 400.0) <= 1e-8);

  // Quartic terms for m = 3 at the initial displacement.
  const double x4 = 0.01;
  const double U = 0.25 * (std::pow(1.0 - x4, 4) + std::pow(-x4 - 1.0, 4));
  CHECK((*fpu.potential)(fpu.ivp.q0) == doctest::Approx(U).epsilon(1e-15));
  CHECK_THROWS_AS(fpu_problem(-1.0, 3), InvalidArgumentError);
}

TEST_CASE("klein-gordon") {
  const auto kg = klein_gordon_problem(32);
  CHECK(kg.ivp.dimension() == 32);
  CHECK(max_abs(kg.ivp.M - kg.ivp.M.transpose()) == 0.0);
  CHECK(max_abs(kg.ivp.M.rowwise().sum()) <= 1e-9);
  CHECK(kg.ivp.M(0, 31) == kg.ivp.M(0, 1));
  const auto sd = decompose_symmetric(kg.ivp.M);
  CHECK(sd.lambda.minCoeff() <= 1e-6);
  CHECK(kg.ivp.q0(31) == doctest::Approx(1.8));  // x_N = L
  CHECK(gradient_mismatch(kg, 0.3, 5) <= 1e-5);
  CHECK(energy_drift(kg, 1.0 / 200.0) <= 1e-8);
}

TEST_CASE("wave") {
  const auto w = wave_problem(40);
  CHECK(w.ivp.dimension() == 39);
  CHECK_FALSE(w.ivp.symmetric_M);
  CHECK(max_abs(w.ivp.M - w.ivp.M.transpose()) > 1.0);
  CHECK_THROWS_AS(decompose_symmetric(w.ivp.M), AsymmetricMatrixError);
  const auto at0 = (*w.exact_solution)(0.0);
  CHECK(max_abs(at0.q - w.ivp.q0) == 0.0);
  CHECK(max_abs(at0.p - w.ivp.p0) == 0.0);
  CHECK(inf_norm(MatrixXd(w.ivp.M / (32.0 * 32.0))) <= kSeriesNormGuard);

  // The exact solution satisfies the semi-discrete system up to round-off:
  // second differences of the quadratic a(x) are exact.
  for (double t : {0.0, 0.13, 1.7, 9.5}) CHECK(wave_exact_residual(w, t) <= 1e-9);
  // ... and it is an eigenvector of M, so the exact motion is free oscillation.
  CHECK(max_abs(w.ivp.M * w.ivp.q0 - 100.0 * w.ivp.q0) <= 1e-10);
}

TEST_CASE("registry") {
  CHECK(problem_names().size() == 4);
  CHECK(make_problem("fpu", {.omega = 50.0}).parameters.at("omega") == 50.0);
  CHECK(make_problem("fpu", {.n = 4}).ivp.dimension() == 8);
  CHECK(make_problem("wave", {.n = 20}).ivp.dimension() == 19);
  CHECK(make_problem("klein-gordon").ivp.t_end == 20.0);
  CHECK(make_problem("satellite", {.t_end = 3.0}).ivp.t_end == 3.0);
  CHECK_THROWS_AS(make_problem("pendulum"), InvalidArgumentError);
  CHECK_THROWS_AS(make_problem("wave", {.t_end = -1.0}), InvalidArgumentError);
}
