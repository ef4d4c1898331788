#pragma once

// Benchmark problems: a perturbed Kepler orbit in regularized coordinates
// (satellite), Fermi-Pasta-Ulam, a periodic nonlinear Klein-Gordon chain and
// a variable-coefficient wave equation with a known exact solution.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltcm/integrator.hpp"

namespace ltcm {

struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

using Potential = std::function<double(const Eigen::VectorXd& q)>;
using ExactSolution = std::function<PhasePoint(double t)>;

struct ProblemSpec {
  std::string name;
  std::map<std::string, double> parameters;
  OscillatoryIVP ivp;
  std::optional<Potential> potential;  // U with f = -grad U, autonomous problems only
  std::optional<ExactSolution> exact_solution;
  std::string notes;
};

/// Satellite orbit, d = 4, M = (kappa / 2) I.
ProblemSpec satellite_problem();

/// Fermi-Pasta-Ulam chain with m stiff springs, d = 2m, M = diag(0, omega^2 I).
ProblemSpec fpu_problem(double omega = 100.0, int m = 3);

/// Klein-Gordon u_tt - u_xx = -u^3 - u on a periodic grid of N points.
ProblemSpec klein_gordon_problem(int N = 32);

/// Wave equation u_tt - a(x) u_xx + 92 u = f(t, x, u) on N - 1 interior points.
/// M is nonsymmetric. The exact solution a(x) cos(10 t) also solves the
/// semi-discrete system, since a is quadratic.
ProblemSpec wave_problem(int N = 40);

struct ProblemOverrides {
  std::optional<double> omega;  // fpu
  std::optional<int> n;         // grid size (klein-gordon, wave) or m (fpu)
  std::optional<double> t_end;
};

/// Registry: "satellite", "fpu", "klein-gordon", "wave". Throws
/// InvalidArgumentError for unknown names or out-of-range overrides.
ProblemSpec make_problem(const std::string& name, const ProblemOverrides& overrides = {});

const std::vector<std::string>& problem_names();

/// max-norm of q'' + M q - f(t, q) along the exact solution, with q''
/// supplied by the caller's exact second derivative.
double ode_residual(const OscillatoryIVP& ivp, double t, const Eigen::VectorXd& q, const Eigen::VectorXd& q_ddot);

/// The wave problem's ODE residual at time t along a(x) cos(10 t).
double wave_exact_residual(const ProblemSpec& wave, double t);

}  // namespace ltcm
