#include "ltcm/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "ltcm/errors.hpp"

namespace ltcm {

namespace {

double max_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void record_observables(const OscillatoryIVP& ivp, Trajectory& traj, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& p) {
  if (ivp.hamiltonian) traj.energy.push_back((*ivp.hamiltonian)(q, p));
  if (ivp.quadratic_invariant) traj.invariant.push_back(q.dot(*ivp.quadratic_invariant * p));
}

void check_contraction(const CoefficientTable& table, const OscillatoryIVP& ivp, const SolverConfig& cfg) {
  if (!cfg.enforce_contraction_guard || !ivp.lipschitz) return;
  const double factor = contraction_factor(table.nodes, table.h, *ivp.lipschitz);
  if (factor >= 1.0) {
    throw ContractionGuardError("contraction guard: h^2 L max|int l_j(c_i z)(1-z)| = " + std::to_string(factor) +
                                " >= 1; reduce h");
  }
}

std::vector<Eigen::VectorXd> stage_forces(const CoefficientTable& table, const OscillatoryIVP& ivp, double t,
                                          const std::vector<Eigen::VectorXd>& stages) {
  std::vector<Eigen::VectorXd> F(stages.size());
  for (std::size_t j = 0; j < stages.size(); ++j) F[j] = ivp.force(t + table.nodes.node(j) * table.h, stages[j]);
  return F;
}

}  // namespace

void OscillatoryIVP::validate() const {
  const Eigen::Index d = M.rows();
  if (M.cols() != d) throw InvalidArgumentError("OscillatoryIVP: M must be square");
  if (q0.size() != d || p0.size() != d) throw InvalidArgumentError("OscillatoryIVP: q0 and p0 must match M");
  if (!force) throw InvalidArgumentError("OscillatoryIVP: force is not set");
  if (!(t_end > 0.0)) throw InvalidArgumentError("OscillatoryIVP: t_end must be positive");
  if (lipschitz && !(*lipschitz >= 0.0)) throw InvalidArgumentError("OscillatoryIVP: Lipschitz constant must be >= 0");
  if (quadratic_invariant) {
    const Eigen::MatrixXd& D = *quadratic_invariant;
    if (D.rows() != d || D.cols() != d) throw InvalidArgumentError("OscillatoryIVP: D must be d x d");
    if (max_abs(D + D.transpose()) > 1e-13) throw InvalidArgumentError("OscillatoryIVP: D must be skew-symmetric");
  }
}

void SolverConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgumentError("SolverConfig: h must be positive");
  if (!(tol > 0.0)) throw InvalidArgumentError("SolverConfig: tol must be positive");
  if (max_iter < 1) throw InvalidArgumentError("SolverConfig: max_iter must be at least 1");
}

std::vector<Eigen::VectorXd> stage_predictor(const CoefficientTable& table, const State& state) {
  std::vector<Eigen::VectorXd> base(table.stages());
  for (std::size_t i = 0; i < table.stages(); ++i) {
    const auto& phi = table.phi_stage[i];
    base[i] = phi.phi0 * state.q + (table.nodes.node(i) * table.h) * (phi.phi1 * state.p);
  }
  return base;
}

FixedPointResult fixed_point_stages(const CoefficientTable& table, const OscillatoryIVP& ivp, const State& state,
                                    const SolverConfig& cfg) {
  check_contraction(table, ivp, cfg);
  const std::size_t s = table.stages();
  const std::vector<Eigen::VectorXd> base = stage_predictor(table, state);

  FixedPointResult out;
  out.stages = base;
  std::vector<Eigen::VectorXd> next(s);
  for (int sweep = 1; sweep <= cfg.max_iter; ++sweep) {
    const auto F = stage_forces(table, ivp, state.t, out.stages);
    double residual = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      const double ch = table.nodes.node(i) * table.h;
      next[i] = base[i];
      for (std::size_t j = 0; j < s; ++j) next[i].noalias() += (ch * ch) * (table.Itilde[i][j] * F[j]);
      residual = std::max(residual, max_norm(next[i] - out.stages[i]));
      scale = std::max(scale, max_norm(next[i]));
    }
    std::swap(out.stages, next);
    out.iterations = sweep;
    out.residual_history.push_back(residual);
    if (!std::isfinite(residual)) break;
    if (cfg.iteration_mode == IterationMode::to_tolerance && residual <= cfg.tol * (1.0 + scale)) return out;
  }
  if (cfg.iteration_mode == IterationMode::fixed_count && std::isfinite(out.residual())) return out;
  throw StepFailure("stage iteration did not converge within " + std::to_string(cfg.max_iter) +
                        " sweeps (residual " + std::to_string(out.residual()) + ")",
                    0, out.residual(), out.iterations);
}

StepResult step(const CoefficientTable& table, const OscillatoryIVP& ivp, const State& state,
                const SolverConfig& cfg) {
  if (table.dimension() != ivp.dimension()) throw InvalidArgumentError("step: table dimension does not match IVP");
  FixedPointResult fp = fixed_point_stages(table, ivp, state, cfg);
  const auto F = stage_forces(table, ivp, state.t, fp.stages);
  const double h = table.h;

  StepResult out;
  out.t = state.t + h;
  out.q = table.phi_main.phi0 * state.q + h * (table.phi_main.phi1 * state.p);
  out.p = -h * (table.M_phi1 * state.q) + table.phi_main.phi0 * state.p;
  for (std::size_t j = 0; j < table.stages(); ++j) {
    out.q.noalias() += (h * h) * (table.I1[j] * F[j]);
    out.p.noalias() += h * (table.I2[j] * F[j]);
  }
  out.iterations_used = fp.iterations;
  out.residual = fp.residual();
  out.stages = std::move(fp.stages);
  return out;
}

CoefficientCache::CoefficientCache(NodeSet nodes, const Eigen::MatrixXd& M, CoefficientPath path)
    : nodes_(std::move(nodes)), M_(M), path_(path) {
  if (path_ == CoefficientPath::spectral) spectral_ = decompose_symmetric(M_);
}

std::shared_ptr<const CoefficientTable> CoefficientCache::get(double h) {
  auto it = tables_.find(h);
  if (it != tables_.end()) return it->second;
  auto table = std::make_shared<const CoefficientTable>(
      path_ == CoefficientPath::spectral ? build_table_spectral(nodes_, *spectral_, h)
                                         : build_table_series(nodes_, M_, h));
  tables_.emplace(h, table);
  return table;
}

CoefficientPath select_path(const OscillatoryIVP& ivp, const SolverConfig& cfg) {
  if (cfg.path) return *cfg.path;
  return ivp.symmetric_M ? CoefficientPath::spectral : CoefficientPath::series;
}

double contraction_factor(const NodeSet& ns, double h, double lipschitz) {
  return h * h * lipschitz * abs_weight_bound(ns);
}

std::vector<double> step_sizes_for(double t_end, double h) {
  if (!(t_end > 0.0) || !(h > 0.0)) throw InvalidArgumentError("step_sizes_for: t_end and h must be positive");
  const double ratio = t_end / h;
  const double n = std::round(ratio);
  if (n >= 1.0 && std::abs(n * h - t_end) <= 1e-10 * t_end) return std::vector<double>(static_cast<std::size_t>(n), h);
  const double full = std::floor(ratio);
  std::vector<double> sizes(static_cast<std::size_t>(full), h);
  sizes.push_back(t_end - full * h);
  return sizes;
}

Trajectory solve(const OscillatoryIVP& ivp, const NodeSet& nodes, const SolverConfig& cfg) {
  ivp.validate();
  cfg.validate();
  CoefficientCache cache(nodes, ivp.M, select_path(ivp, cfg));
  const std::vector<double> sizes = step_sizes_for(ivp.t_end, cfg.h);

  Trajectory traj;
  traj.times.reserve(sizes.size() + 1);
  traj.q.reserve(sizes.size() + 1);
  traj.p.reserve(sizes.size() + 1);
  traj.times.push_back(0.0);
  traj.q.push_back(ivp.q0);
  traj.p.push_back(ivp.p0);
  record_observables(ivp, traj, ivp.q0, ivp.p0);

  State state{0.0, ivp.q0, ivp.p0};
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto table = cache.get(sizes[k]);
    StepResult r;
    try {
      r = step(*table, ivp, state, cfg);
    } catch (const StepFailure& e) {
      throw StepFailure("step " + std::to_string(k) + " at t = " + std::to_string(state.t) + ": " + e.what(), k,
                        e.residual(), e.iterations());
    }
    state.t = k + 1 == sizes.size() ? ivp.t_end : static_cast<double>(k + 1) * cfg.h;
    state.q = std::move(r.q);
    state.p = std::move(r.p);
    traj.times.push_back(state.t);
    traj.q.push_back(state.q);
    traj.p.push_back(state.p);
    traj.iterations.push_back(r.iterations_used);
    traj.residuals.push_back(r.residual);
    record_observables(ivp, traj, state.q, state.p);
  }
  return traj;
}

ReferenceSolution reference_solve(const OscillatoryIVP& ivp, int n_substeps_per_unit, const NodeSet& nodes) {
  if (n_substeps_per_unit < 1) throw InvalidArgumentError("reference_solve: n_substeps_per_unit must be >= 1");
  SolverConfig cfg;
  cfg.tol = 1e-15;
  cfg.max_iter = 200;
  SolverConfig fine_cfg = cfg;
  cfg.h = 1.0 / n_substeps_per_unit;
  fine_cfg.h = 0.5 / n_substeps_per_unit;

  auto coarse_future = std::async(std::launch::async, [&] { return solve(ivp, nodes, cfg); });
  Trajectory fine = solve(ivp, nodes, fine_cfg);
  const Trajectory coarse = coarse_future.get();

  const double change =
      std::max(max_norm(fine.q.back() - coarse.q.back()), max_norm(fine.p.back() - coarse.p.back()));
  const double size = std::max({1.0, max_norm(fine.q.back()), max_norm(fine.p.back())});
  if (!(change <= 1e-10 * size)) {
    throw OracleUnreliableError("reference_solve: halving the step changed the endpoint by " + std::to_string(change) +
                                    "; increase n_substeps_per_unit",
                                change);
  }
  const double order = 2.0 * static_cast<double>(nodes.size());
  return {std::move(fine), change, change / (std::pow(2.0, order) - 1.0)};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

OrderEstimate estimate_order(const OscillatoryIVP& ivp, const NodeSet& nodes, const SolverConfig& base,
                             const std::vector<double>& step_sizes, const ErrorMetric& metric) {
  if (step_sizes.size() < 3) throw InvalidArgumentError("estimate_order: need at least three step sizes");
  const double ratio = step_sizes[1] / step_sizes[0];
  for (std::size_t k = 0; k + 1 < step_sizes.size(); ++k) {
    if (!(step_sizes[k] > 0.0) || std::abs(step_sizes[k + 1] / step_sizes[k] - ratio) > 1e-9 * ratio ||
        ratio == 1.0) {
      throw InvalidArgumentError("estimate_order: step sizes must form a geometric progression");
    }
  }

  std::vector<std::future<double>> runs;
  runs.reserve(step_sizes.size());
  for (double h : step_sizes) {
    runs.push_back(std::async(std::launch::async, [&ivp, &nodes, &metric, base, h] {
      SolverConfig cfg = base;
      cfg.h = h;
      const Trajectory traj = solve(ivp, nodes, cfg);
      return metric(traj.times.back(), traj.q.back(), traj.p.back());
    }));
  }

  OrderEstimate out;
  out.step_sizes = step_sizes;
  std::vector<double> hs, errs;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const double err = runs[k].get();
    out.errors.push_back(err);
    if (!(err >= kErrorFloor) || !std::isfinite(err)) {
      out.excluded.push_back(k);
      continue;
    }
    hs.push_back(step_sizes[k]);
    errs.push_back(err);
  }
  out.slope = loglog_slope(hs, errs);
  return out;
}

}  // namespace ltcm
