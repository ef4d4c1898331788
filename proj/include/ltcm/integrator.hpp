#pragma once

// One-step map of the trigonometric collocation method for
//   q'' + M q = f(t, q),
// its fixed-point stage solver and a uniform-grid driver.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ltcm/coeffs.hpp"
#include "ltcm/lagrange.hpp"
#include "ltcm/matfun.hpp"

namespace ltcm {

using Force = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& q)>;
using Hamiltonian = std::function<double(const Eigen::VectorXd& q, const Eigen::VectorXd& p)>;

/// q'' + M q = f(t, q), q(0) = q0, q'(0) = p0 on [0, t_end].
///
/// symmetric_M is the caller's declaration that M is symmetric PSD; it
/// selects the spectral coefficient path (the series path otherwise).
struct OscillatoryIVP {
  Eigen::MatrixXd M;
  bool symmetric_M = true;
  Force force;
  Eigen::VectorXd q0;
  Eigen::VectorXd p0;
  double t_end = 1.0;
  std::optional<double> lipschitz;
  std::optional<Hamiltonian> hamiltonian;
  std::optional<Eigen::MatrixXd> quadratic_invariant;  // skew D, Q = q^T D p

  Eigen::Index dimension() const { return M.rows(); }

  /// Throws InvalidArgumentError on inconsistent sizes or a non-skew D.
  void validate() const;
};

enum class IterationMode {
  to_tolerance,  // sweep until the stage update is below tol, fail after max_iter
  fixed_count,   // exactly max_iter sweeps, no convergence test
};

struct SolverConfig {
  double h = 0.01;
  double tol = 1e-14;
  int max_iter = 50;
  bool enforce_contraction_guard = false;
  IterationMode iteration_mode = IterationMode::to_tolerance;
  std::optional<CoefficientPath> path;  // overrides the IVP's symmetry declaration

  void validate() const;
};

struct State {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

struct FixedPointResult {
  std::vector<Eigen::VectorXd> stages;
  int iterations = 0;
  std::vector<double> residual_history;  // max-norm of each sweep's update

  double residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

struct StepResult {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  int iterations_used = 0;
  double residual = 0.0;
  std::vector<Eigen::VectorXd> stages;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> p;
  std::vector<int> iterations;     // per step (size = samples - 1)
  std::vector<double> residuals;   // per step
  std::vector<double> energy;      // per sample, when a Hamiltonian is given
  std::vector<double> invariant;   // per sample, when D is given

  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
  State back() const { return {times.back(), q.back(), p.back()}; }
};

/// Free-oscillation predictor phi_0(c_i^2 V) q + c_i h phi_1(c_i^2 V) p.
std::vector<Eigen::VectorXd> stage_predictor(const CoefficientTable& table, const State& state);

/// Picard iteration for the stage values
///   Q_i = phi_0(c_i^2 V) q + c_i h phi_1(c_i^2 V) p + (c_i h)^2 sum_j Itilde_ij f(t + c_j h, Q_j)
/// starting from the free-oscillation predictor. Throws StepFailure
/// (step_index 0) if to_tolerance mode does not converge within max_iter.
FixedPointResult fixed_point_stages(const CoefficientTable& table, const OscillatoryIVP& ivp, const State& state,
                                    const SolverConfig& cfg);

/// One step of size table.h. The table must have been built for ivp.M.
StepResult step(const CoefficientTable& table, const OscillatoryIVP& ivp, const State& state,
                const SolverConfig& cfg);

/// Builds and memoizes coefficient tables for one (nodes, M, path); a solve
/// needs one table for h and, when t_end is not a multiple of h, one for the
/// final shorter step.
class CoefficientCache {
 public:
  CoefficientCache(NodeSet nodes, const Eigen::MatrixXd& M, CoefficientPath path);

  std::shared_ptr<const CoefficientTable> get(double h);
  CoefficientPath path() const { return path_; }
  const NodeSet& nodes() const { return nodes_; }

 private:
  NodeSet nodes_;
  Eigen::MatrixXd M_;
  CoefficientPath path_;
  std::optional<SpectralDecomposition<double>> spectral_;
  std::map<double, std::shared_ptr<const CoefficientTable>> tables_;
};

/// Coefficient path a solve will use: cfg.path when given, else spectral
/// for a declared-symmetric M and series otherwise.
CoefficientPath select_path(const OscillatoryIVP& ivp, const SolverConfig& cfg);

/// Contraction factor h^2 L max_ij int_0^1 |l_j(c_i z)(1-z)| dz.
double contraction_factor(const NodeSet& ns, double h, double lipschitz);

/// Uniform grid t_k = k h; if t_end is not a multiple of h a final shorter
/// step with its own table closes the interval. Step failures are rethrown
/// with their step index.
Trajectory solve(const OscillatoryIVP& ivp, const NodeSet& nodes, const SolverConfig& cfg);

/// Sizes of the steps solve() takes for (t_end, h).
std::vector<double> step_sizes_for(double t_end, double h);

struct ReferenceSolution {
  Trajectory trajectory;     // at step 1 / (2 n_substeps_per_unit)
  double endpoint_change;    // max-norm change of the endpoint when halving the step
  double estimated_error;    // Richardson estimate for the returned endpoint
};

/// High-accuracy solution via the same method at h = 1/n and h = 1/(2n),
/// self-checked: the endpoint may change by at most 1e-10 max(1, |y|)
/// between the two, else OracleUnreliableError.
ReferenceSolution reference_solve(const OscillatoryIVP& ivp, int n_substeps_per_unit,
                                  const NodeSet& nodes = gauss_legendre_2());

/// Global error of an endpoint (t, q, p).
using ErrorMetric = std::function<double(double t, const Eigen::VectorXd& q, const Eigen::VectorXd& p)>;

struct OrderEstimate {
  double slope = 0.0;  // NaN if fewer than two usable points remain
  std::vector<double> step_sizes;
  std::vector<double> errors;
  std::vector<std::size_t> excluded;  // indices with error below kErrorFloor
};

inline constexpr double kErrorFloor = 1e-12;

/// Least-squares slope of log(error) against log(h) over at least three
/// geometrically spaced step sizes; the solves run concurrently.
OrderEstimate estimate_order(const OscillatoryIVP& ivp, const NodeSet& nodes, const SolverConfig& base,
                             const std::vector<double>& step_sizes, const ErrorMetric& metric);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ltcm
