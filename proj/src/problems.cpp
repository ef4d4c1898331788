#include "ltcm/problems.hpp"

#include <cmath>
#include <numbers>

#include "ltcm/errors.hpp"

namespace ltcm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Hamiltonian separable_hamiltonian(const MatrixXd& M, Potential U) {
  return [M, U = std::move(U)](const VectorXd& q, const VectorXd& p) {
    return 0.5 * p.squaredNorm() + 0.5 * q.dot(M * q) + U(q);
  };
}

}  // namespace

ProblemSpec satellite_problem() {
  constexpr double K2 = 3.98601e5;
  constexpr double r0 = 6.8e3;
  constexpr double e = 0.1;
  constexpr double J2 = 1.08625e-3;
  constexpr double R = 6.37122e3;
  const double lambda = 1.5 * K2 * J2 * R * R;

  const double s3 = std::sqrt(3.0);
  VectorXd q0 = std::sqrt(r0 / 2.0) * VectorXd{{-1.0, -s3 / 2.0, -0.5, 0.0}};
  VectorXd p0 = 0.5 * std::sqrt(K2 * (1.0 + e) / 2.0) * VectorXd{{1.0, s3 / 2.0, 0.5, 0.0}};
  const double V0 = -lambda / (12.0 * r0 * r0 * r0);
  const double kappa = (K2 - 2.0 * p0.squaredNorm()) / r0 - V0;

  Potential U = [lambda](const VectorXd& q) {
    const double r = q.squaredNorm();
    const double S = q(0) * q(2) + q(1) * q(3);
    return lambda * (S * S / (r * r * r * r) - 1.0 / (12.0 * r * r));
  };
  Force force = [lambda](double, const VectorXd& q) -> VectorXd {
    const double r = q.squaredNorm();
    const double S = q(0) * q(2) + q(1) * q(3);
    const VectorXd dS{{q(2), q(3), q(0), q(1)}};
    const double r3 = r * r * r;
    const double r4 = r3 * r;
    const VectorXd grad = lambda * (2.0 * S / r4 * dS - 8.0 * S * S / (r4 * r) * q + q / (3.0 * r3));
    return -grad;
  };

  ProblemSpec spec;
  spec.name = "satellite";
  spec.parameters = {{"K2", K2}, {"r0", r0}, {"e", e}, {"J2", J2}, {"R", R}, {"lambda", lambda}, {"kappa", kappa}};
  spec.ivp.M = 0.5 * kappa * MatrixXd::Identity(4, 4);
  spec.ivp.symmetric_M = true;
  spec.ivp.force = std::move(force);
  spec.ivp.q0 = q0;
  spec.ivp.p0 = p0;
  spec.ivp.t_end = 100.0;
  spec.ivp.hamiltonian = separable_hamiltonian(spec.ivp.M, U);
  spec.potential = std::move(U);
  spec.notes =
      "regularized perturbed Kepler orbit; q0 and p0 as printed are antiparallel, "
      "so the orbit reaches r = 0 near s = 0.2013";
  return spec;
}

ProblemSpec fpu_problem(double omega, int m) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgumentError("fpu_problem: omega must be positive");
  if (m < 1) throw InvalidArgumentError("fpu_problem: m must be at least 1");
  const Eigen::Index d = 2 * m;

  // Argument of each quartic term as a linear form in x.
  MatrixXd B = MatrixXd::Zero(m + 1, d);
  B(0, 0) = 1.0;
  B(0, m) = -1.0;
  for (int i = 1; i < m; ++i) {
    B(i, i) = 1.0;            // x_{i+1}
    B(i, m + i) = -1.0;       // x_{m+i+1}
    B(i, i - 1) = -1.0;       // x_i
    B(i, m + i - 1) = -1.0;   // x_{m+i}
  }
  B(m, m - 1) = 1.0;
  B(m, d - 1) = 1.0;

  Potential U = [B](const VectorXd& x) { return 0.25 * (B * x).array().pow(4).sum(); };
  Force force = [B](double, const VectorXd& x) -> VectorXd {
    const VectorXd u = B * x;
    return -(B.transpose() * u.array().cube().matrix());
  };

  ProblemSpec spec;
  spec.name = "fpu";
  spec.parameters = {{"omega", omega}, {"m", double(m)}};
  spec.ivp.M = MatrixXd::Zero(d, d);
  spec.ivp.M.bottomRightCorner(m, m) = omega * omega * MatrixXd::Identity(m, m);
  spec.ivp.symmetric_M = true;
  spec.ivp.force = std::move(force);
  spec.ivp.q0 = VectorXd::Zero(d);
  spec.ivp.p0 = VectorXd::Zero(d);
  spec.ivp.q0(0) = 1.0;
  spec.ivp.p0(0) = 1.0;
  spec.ivp.q0(m) = 1.0 / omega;
  spec.ivp.p0(m) = 1.0;
  spec.ivp.t_end = 10.0;
  spec.ivp.hamiltonian = separable_hamiltonian(spec.ivp.M, U);
  spec.potential = std::move(U);
  spec.notes = "stiff/soft spring chain";
  return spec;
}

ProblemSpec klein_gordon_problem(int N) {
  if (N < 3) throw InvalidArgumentError("klein_gordon_problem: N must be at least 3");
  constexpr double L = 1.28;
  constexpr double A = 0.9;
  const double dx = L / N;

  MatrixXd M = MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    M(i, i) = 2.0;
    M(i, (i + 1) % N) = -1.0;
    M(i, (i + N - 1) % N) = -1.0;
  }
  M /= dx * dx;

  VectorXd u0(N);
  for (int i = 0; i < N; ++i) {
    const double x = (i + 1) * dx;
    u0(i) = A * (1.0 + std::cos(2.0 * std::numbers::pi * x / L));
  }

  Potential U = [](const VectorXd& u) {
    const auto a = u.array();
    return (0.5 * a.square() + 0.25 * a.square().square()).sum();
  };
  Force force = [](double, const VectorXd& u) -> VectorXd { return -(u.array().cube() + u.array()).matrix(); };

  ProblemSpec spec;
  spec.name = "klein-gordon";
  spec.parameters = {{"N", double(N)}, {"L", L}, {"A", A}, {"dx", dx}};
  spec.ivp.M = M;
  spec.ivp.symmetric_M = true;
  spec.ivp.force = std::move(force);
  spec.ivp.q0 = u0;
  spec.ivp.p0 = VectorXd::Zero(N);
  spec.ivp.t_end = 20.0;
  spec.ivp.hamiltonian = separable_hamiltonian(M, U);
  spec.potential = std::move(U);
  spec.notes = "periodic second differences, x_i = i dx";
  return spec;
}

namespace {

VectorXd wave_profile(int N) {
  VectorXd a(N - 1);
  for (int i = 1; i < N; ++i) {
    const double x = double(i) / N;
    a(i - 1) = 4.0 * x * (1.0 - x);
  }
  return a;
}

}  // namespace

ProblemSpec wave_problem(int N) {
  if (N < 3) throw InvalidArgumentError("wave_problem: N must be at least 3");
  const Eigen::Index d = N - 1;
  const double inv_dx2 = double(N) * double(N);
  const VectorXd a = wave_profile(N);

  MatrixXd M = 92.0 * MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    M(i, i) += 2.0 * a(i) * inv_dx2;
    if (i > 0) M(i, i - 1) -= a(i) * inv_dx2;
    if (i + 1 < d) M(i, i + 1) -= a(i) * inv_dx2;
  }

  const VectorXd a2 = a.array().square();
  const VectorXd a5_4 = 0.25 * a.array().pow(5);
  Force force = [a2, a5_4](double t, const VectorXd& u) -> VectorXd {
    const double s = std::sin(20.0 * t);
    const auto ua = u.array();
    return (ua.pow(5) - a2.array() * ua.cube() + a5_4.array() * (s * s * std::cos(10.0 * t))).matrix();
  };

  ProblemSpec spec;
  spec.name = "wave";
  spec.parameters = {{"N", double(N)}, {"dx", 1.0 / N}};
  spec.ivp.M = M;
  spec.ivp.symmetric_M = false;
  spec.ivp.force = std::move(force);
  spec.ivp.q0 = a;
  spec.ivp.p0 = VectorXd::Zero(d);
  spec.ivp.t_end = 10.0;
  spec.exact_solution = [a](double t) -> PhasePoint {
    return {a * std::cos(10.0 * t), -10.0 * a * std::sin(10.0 * t)};
  };
  spec.notes = "variable coefficient a(x) = 4x(1-x), Dirichlet boundaries";
  return spec;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"satellite", "fpu", "klein-gordon", "wave"};
  return names;
}

ProblemSpec make_problem(const std::string& name, const ProblemOverrides& overrides) {
  ProblemSpec spec;
  if (name == "satellite") {
    spec = satellite_problem();
  } else if (name == "fpu") {
    spec = fpu_problem(overrides.omega.value_or(100.0), overrides.n.value_or(3));
  } else if (name == "klein-gordon") {
    spec = klein_gordon_problem(overrides.n.value_or(32));
  } else if (name == "wave") {
    spec = wave_problem(overrides.n.value_or(40));
  } else {
    throw InvalidArgumentError("unknown problem '" + name + "' (expected satellite, fpu, klein-gordon or wave)");
  }
  if (overrides.t_end) {
    if (!(*overrides.t_end > 0.0)) throw InvalidArgumentError("t_end must be positive");
    spec.ivp.t_end = *overrides.t_end;
  }
  return spec;
}

double ode_residual(const OscillatoryIVP& ivp, double t, const VectorXd& q, const VectorXd& q_ddot) {
  return (q_ddot + ivp.M * q - ivp.force(t, q)).lpNorm<Eigen::Infinity>();
}

double wave_exact_residual(const ProblemSpec& wave, double t) {
  if (wave.name != "wave" || !wave.exact_solution) throw InvalidArgumentError("wave_exact_residual: not a wave problem");
  const VectorXd q = (*wave.exact_solution)(t).q;
  return ode_residual(wave.ivp, t, q, -100.0 * q);
}

}  // namespace ltcm
