#include "ltcm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ltcm/coeffs.hpp"
#include "ltcm/csv.hpp"
#include "ltcm/errors.hpp"
#include "ltcm/integrator.hpp"
#include "ltcm/problems.hpp"
#include "ltcm/stability.hpp"

namespace ltcm::cli {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

double parse_decimal(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw InvalidArgumentError(what + ": '" + text + "' is not a decimal number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_decimal(item, what));
  if (values.empty()) throw InvalidArgumentError(what + ": empty list");
  return values;
}

std::pair<double, double> parse_range(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 2 || !(v[0] <= v[1])) throw InvalidArgumentError(what + ": expected 'lo,hi' with lo <= hi");
  return {v[0], v[1]};
}

std::pair<std::size_t, std::size_t> parse_grid(std::string text) {
  for (char& c : text)
    if (c == 'x' || c == 'X') c = ',';
  const auto v = parse_list(text, "--grid");
  if (v.size() != 2 || v[0] < 2 || v[1] < 2 || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1])) {
    throw InvalidArgumentError("--grid: expected 'NVxNz' with both counts >= 2");
  }
  return {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1])};
}

// ---------------------------------------------------------------------------
// Manifest -> library objects

NodeSet nodes_of(const RunManifest& m) { return m.nodes.empty() ? gauss_legendre_2() : NodeSet(m.nodes); }

ProblemSpec problem_of(const RunManifest& m) {
  ProblemSpec spec = make_problem(m.problem, {m.omega, m.n, m.t_end});
  if (m.linear) {
    spec.ivp.force = [](double, const VectorXd& q) -> VectorXd { return VectorXd::Zero(q.size()); };
    spec.potential.reset();
    spec.exact_solution.reset();
    spec.ivp.hamiltonian.reset();
    if (spec.ivp.symmetric_M) {
      spec.ivp.hamiltonian = [M = spec.ivp.M](const VectorXd& q, const VectorXd& p) {
        return 0.5 * p.squaredNorm() + 0.5 * q.dot(M * q);
      };
    }
  }
  return spec;
}

SolverConfig config_of(const RunManifest& m) {
  SolverConfig cfg;
  cfg.h = m.h;
  cfg.tol = m.tol;
  cfg.max_iter = m.max_iter;
  if (m.iteration_mode == "fixed") {
    cfg.iteration_mode = IterationMode::fixed_count;
  } else if (m.iteration_mode != "tolerance") {
    throw InvalidArgumentError("--iteration-mode must be 'tolerance' or 'fixed'");
  }
  if (m.path == "spectral") {
    cfg.path = CoefficientPath::spectral;
  } else if (m.path == "series") {
    cfg.path = CoefficientPath::series;
  } else if (m.path != "auto") {
    throw InvalidArgumentError("--path must be 'auto', 'spectral' or 'series'");
  }
  cfg.validate();
  return cfg;
}

StageMatrixForm form_of(const RunManifest& m) {
  if (m.form == "published") return StageMatrixForm::published;
  if (m.form == "node-weighted") return StageMatrixForm::node_weighted;
  throw InvalidArgumentError("--form must be 'published' or 'node-weighted'");
}

// Runs body with the CSV sink: the --out file if given, otherwise out.
void with_sink(const RunManifest& m, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (m.out.empty()) {
    body(out);
    return;
  }
  std::ofstream file(m.out, std::ios::binary);
  if (!file) throw InvalidArgumentError("cannot open output file '" + m.out + "'");
  body(file);
  if (!file) throw InvalidArgumentError("failed writing '" + m.out + "'");
}

// ---------------------------------------------------------------------------
// Commands

int cmd_solve(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const ProblemSpec spec = problem_of(m);
  const SolverConfig cfg = config_of(m);
  const Trajectory traj = solve(spec.ivp, nodes_of(m), cfg);
  const Eigen::Index d = spec.ivp.dimension();
  with_sink(m, out, [&](std::ostream& os) {
    os << 't';
    for (Eigen::Index k = 1; k <= d; ++k) os << ",q_" << k;
    for (Eigen::Index k = 1; k <= d; ++k) os << ",p_" << k;
    os << ",iterations";
    if (!traj.energy.empty()) os << ",energy";
    if (!traj.invariant.empty()) os << ",invariant";
    os << '\n';
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
      os << format_double(traj.times[r]);
      for (Eigen::Index k = 0; k < d; ++k) os << ',' << format_double(traj.q[r](k));
      for (Eigen::Index k = 0; k < d; ++k) os << ',' << format_double(traj.p[r](k));
      os << ',' << (r == 0 ? 0 : traj.iterations[r - 1]);
      if (!traj.energy.empty()) os << ',' << format_double(traj.energy[r]);
      if (!traj.invariant.empty()) os << ',' << format_double(traj.invariant[r]);
      os << '\n';
    }
  });
  err << "path " << to_string(select_path(spec.ivp, cfg)) << ", steps " << traj.steps() << '\n';
  return kExitOk;
}

int cmd_convergence(const RunManifest& m, std::ostream& out, std::ostream& err) {
  if (m.h_list.size() < 3) throw InvalidArgumentError("convergence: --h-list needs at least three step sizes");
  const ProblemSpec spec = problem_of(m);
  const SolverConfig cfg = config_of(m);
  const NodeSet ns = nodes_of(m);

  ErrorMetric metric;
  VectorXd q_ref;
  if (spec.exact_solution) {
    metric = [&](double t, const VectorXd& q, const VectorXd&) {
      return ((*spec.exact_solution)(t).q - q).lpNorm<Eigen::Infinity>();
    };
    err << "reference: exact solution\n";
  } else {
    double h_min = m.h_list.front();
    for (double h : m.h_list) h_min = std::min(h_min, h);
    const int n = m.reference_n.value_or(static_cast<int>(std::ceil(4.0 / h_min)));
    const ReferenceSolution ref = reference_solve(spec.ivp, n, ns);
    q_ref = ref.trajectory.q.back();
    metric = [&](double, const VectorXd& q, const VectorXd&) { return (q_ref - q).lpNorm<Eigen::Infinity>(); };
    err << "reference: reference_solve n = " << n << ", endpoint change " << format_double(ref.endpoint_change)
        << '\n';
  }

  const OrderEstimate est = estimate_order(spec.ivp, ns, cfg, m.h_list, metric);
  with_sink(m, out, [&](std::ostream& os) {
    os << "h,global_error,used\n";
    for (std::size_t k = 0; k < est.step_sizes.size(); ++k) {
      const bool used = std::find(est.excluded.begin(), est.excluded.end(), k) == est.excluded.end();
      os << format_double(est.step_sizes[k]) << ',' << format_double(est.errors[k]) << ',' << (used ? 1 : 0)
         << '\n';
    }
  });
  err << "slope " << format_double(est.slope) << '\n';
  return kExitOk;
}

int cmd_energy(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const ProblemSpec spec = problem_of(m);
  if (!spec.ivp.hamiltonian) throw InvalidArgumentError("energy: problem '" + m.problem + "' has no Hamiltonian");
  const Trajectory traj = solve(spec.ivp, nodes_of(m), config_of(m));
  double max_drift = 0.0;
  with_sink(m, out, [&](std::ostream& os) {
    os << "t,energy_error\n";
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
      const double drift = std::abs(traj.energy[r] - traj.energy.front());
      max_drift = std::max(max_drift, drift);
      os << format_double(traj.times[r]) << ',' << format_double(drift) << '\n';
    }
  });
  err << "max_drift " << format_double(max_drift) << '\n';
  return kExitOk;
}

int cmd_stability(const RunManifest& m, std::ostream& out, std::ostream& err) {
  ScanGrid grid;
  grid.V_range = m.v_range;
  grid.z_range = m.z_range;
  grid.V_points = m.grid.first;
  grid.z_points = m.grid.second;
  const auto cells = scan_region(nodes_of(m), grid, form_of(m));
  with_sink(m, out, [&](std::ostream& os) { write_region_csv(os, cells); });
  std::size_t stable = 0, periodic = 0;
  for (const auto& c : cells) {
    stable += c.stable;
    periodic += c.periodic;
  }
  err << "cells " << cells.size() << ", stable " << stable << ", periodic " << periodic << '\n';
  return kExitOk;
}

int cmd_coeffs(const RunManifest& m, std::ostream& out, std::ostream& err) {
  MatrixXd M;
  bool declared_symmetric = true;
  if (!m.matrix.empty()) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(m.matrix.size()))));
    if (d * d != static_cast<Eigen::Index>(m.matrix.size())) {
      throw InvalidArgumentError("--matrix: expected d*d comma-separated entries (row-major)");
    }
    M = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(m.matrix.data(), d, d);
    declared_symmetric = max_abs(MatrixXd(M - M.transpose())) <= 1e-12 * std::max(1.0, max_abs(M));
  } else {
    const ProblemSpec spec = problem_of(m);
    M = spec.ivp.M;
    declared_symmetric = spec.ivp.symmetric_M;
  }
  const NodeSet ns = nodes_of(m);
  if (!(m.h > 0.0)) throw InvalidArgumentError("--h must be positive");

  CoefficientPath path = declared_symmetric ? CoefficientPath::spectral : CoefficientPath::series;
  if (m.path == "spectral") path = CoefficientPath::spectral;
  if (m.path == "series") path = CoefficientPath::series;
  if (m.path != "auto" && m.path != "spectral" && m.path != "series") {
    throw InvalidArgumentError("--path must be 'auto', 'spectral' or 'series'");
  }

  std::optional<SpectralDecomposition<double>> sd;
  if (path == CoefficientPath::spectral) {
    sd = decompose_symmetric(M);
  } else {
    try {
      sd = decompose_symmetric(M);
    } catch (const AsymmetricMatrixError&) {
    }
  }
  const CoefficientTable table = path == CoefficientPath::spectral ? build_table_spectral(ns, *sd, m.h)
                                                                   : build_table_series(ns, M, m.h);

  // Independent oracle: adaptive quadrature at each h lambda_k, assembled
  // through the eigenbasis. Unavailable for nonsymmetric M.
  auto oracle = [&](KernelKind kind, std::size_t j, std::size_t i) -> std::optional<MatrixXd> {
    if (!sd) return std::nullopt;
    VectorXd diag(sd->dimension());
    for (Eigen::Index k = 0; k < diag.size(); ++k) {
      const double x = m.h * sd->lambda(k);
      diag(k) = quadrature_oracle(ns, kind, j, i, x * x);
    }
    return MatrixXd(sd->P.transpose() * diag.asDiagonal() * sd->P);
  };

  double worst = 0.0;
  with_sink(m, out, [&](std::ostream& os) {
    os << "kernel,i,j,row,col,value,oracle,abs_diff\n";
    auto emit = [&](KernelKind kind, std::size_t j, std::optional<std::size_t> i, const MatrixXd& value) {
      const auto ref = oracle(kind, j, i.value_or(0));
      for (Eigen::Index r = 0; r < value.rows(); ++r) {
        for (Eigen::Index c = 0; c < value.cols(); ++c) {
          const double o = ref ? (*ref)(r, c) : std::nan("");
          const double diff = std::abs(value(r, c) - o);
          if (ref) worst = std::max(worst, diff);
          os << to_string(kind) << ',' << (i ? std::to_string(*i + 1) : std::string()) << ',' << j + 1 << ','
             << r + 1 << ',' << c + 1 << ',' << format_double(value(r, c)) << ',' << format_double(o) << ','
             << format_double(ref ? diff : std::nan("")) << '\n';
        }
      }
    };
    for (std::size_t j = 0; j < ns.size(); ++j) emit(KernelKind::I1, j, std::nullopt, table.I1[j]);
    for (std::size_t j = 0; j < ns.size(); ++j) emit(KernelKind::I2, j, std::nullopt, table.I2[j]);
    for (std::size_t i = 0; i < ns.size(); ++i)
      for (std::size_t j = 0; j < ns.size(); ++j) emit(KernelKind::Itilde, j, i, table.Itilde[i][j]);
  });
  err << "path " << to_string(path) << ", max_abs_diff "
      << (sd ? format_double(worst) : std::string("n/a (nonsymmetric M)")) << '\n';
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest serialization

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["problem"] = m.problem;
  j["omega"] = m.omega ? json(*m.omega) : json(nullptr);
  j["n"] = m.n ? json(*m.n) : json(nullptr);
  j["t_end"] = m.t_end ? json(*m.t_end) : json(nullptr);
  j["linear"] = m.linear;
  j["matrix"] = m.matrix;
  j["nodes"] = m.nodes;
  j["h"] = m.h;
  j["h_list"] = m.h_list;
  j["tol"] = m.tol;
  j["max_iter"] = m.max_iter;
  j["iteration_mode"] = m.iteration_mode;
  j["path"] = m.path;
  j["reference_n"] = m.reference_n ? json(*m.reference_n) : json(nullptr);
  j["grid"] = {m.grid.first, m.grid.second};
  j["v_range"] = {m.v_range.first, m.v_range.second};
  j["z_range"] = {m.z_range.first, m.z_range.second};
  j["form"] = m.form;
  j["out"] = m.out;
  j["seed"] = m.seed;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunManifest m;
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<typename std::decay_t<decltype(field)>::value_type>();
  };
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("command", m.command);
  get("problem", m.problem);
  opt("omega", m.omega);
  opt("n", m.n);
  opt("t_end", m.t_end);
  get("linear", m.linear);
  get("matrix", m.matrix);
  get("nodes", m.nodes);
  get("h", m.h);
  get("h_list", m.h_list);
  get("tol", m.tol);
  get("max_iter", m.max_iter);
  get("iteration_mode", m.iteration_mode);
  get("path", m.path);
  opt("reference_n", m.reference_n);
  get("grid", m.grid);
  get("v_range", m.v_range);
  get("z_range", m.z_range);
  get("form", m.form);
  get("out", m.out);
  get("seed", m.seed);
  return m;
}

int execute(const RunManifest& m, std::ostream& out, std::ostream& err) {
  if (m.command == "solve") return cmd_solve(m, out, err);
  if (m.command == "convergence") return cmd_convergence(m, out, err);
  if (m.command == "energy") return cmd_energy(m, out, err);
  if (m.command == "stability") return cmd_stability(m, out, err);
  if (m.command == "coeffs") return cmd_coeffs(m, out, err);
  throw InvalidArgumentError("unknown command '" + m.command + "'");
}

// ---------------------------------------------------------------------------
// Command line

namespace {

// Raw flag text, converted after parsing so every number goes through the
// same decimal parser.
struct RawFlags {
  std::string problem = "fpu";
  std::string omega, n, t_end, h, h_list, tol, max_iter, nodes, matrix, grid, v_range, z_range, reference_n;
  std::string iteration_mode = "tolerance";
  std::string path = "auto";
  std::string form = "published";
  std::string out;
  std::string write_manifest;
  bool linear = false;
};

int parse_count(const std::string& text, const std::string& what) {
  const double v = parse_decimal(text, what);
  if (v != std::floor(v) || v < 1 || v > 1e9) throw InvalidArgumentError(what + ": expected a positive integer");
  return static_cast<int>(v);
}

RunManifest manifest_from_flags(const std::string& command, const RawFlags& f) {
  RunManifest m;
  m.command = command;
  m.problem = f.problem;
  if (!f.omega.empty()) m.omega = parse_decimal(f.omega, "--omega");
  if (!f.n.empty()) m.n = parse_count(f.n, "--n");
  if (!f.t_end.empty()) m.t_end = parse_decimal(f.t_end, "--t-end");
  m.linear = f.linear;
  if (!f.matrix.empty()) m.matrix = parse_list(f.matrix, "--matrix");
  if (!f.nodes.empty()) m.nodes = parse_list(f.nodes, "--nodes");
  if (!f.h.empty()) m.h = parse_decimal(f.h, "--h");
  if (!f.h_list.empty()) m.h_list = parse_list(f.h_list, "--h-list");
  if (!f.tol.empty()) m.tol = parse_decimal(f.tol, "--tol");
  if (!f.max_iter.empty()) m.max_iter = parse_count(f.max_iter, "--max-iter");
  if (!f.reference_n.empty()) m.reference_n = parse_count(f.reference_n, "--reference-n");
  m.iteration_mode = f.iteration_mode;
  m.path = f.path;
  if (!f.grid.empty()) m.grid = parse_grid(f.grid);
  if (!f.v_range.empty()) m.v_range = parse_range(f.v_range, "--v-range");
  if (!f.z_range.empty()) m.z_range = parse_range(f.z_range, "--z-range");
  m.form = f.form;
  m.out = f.out;
  return m;
}

void add_common(CLI::App* sub, RawFlags& f) {
  sub->add_option("--problem", f.problem, "satellite | fpu | klein-gordon | wave")
      ->check(CLI::IsMember(problem_names()));
  sub->add_option("--omega", f.omega, "FPU stiffness frequency");
  sub->add_option("--n", f.n, "grid size (klein-gordon, wave) or spring count m (fpu)");
  sub->add_option("--t-end", f.t_end, "end of the integration interval");
  sub->add_option("--nodes", f.nodes, "comma-separated collocation nodes in [0,1] (default Gauss-Legendre 2)");
  sub->add_option("--out", f.out, "CSV output file (default standard output)");
  sub->add_option("--write-manifest", f.write_manifest, "also write the run manifest as JSON");
  sub->add_flag("--linear", f.linear, "replace the nonlinear force by zero");
}

void add_solver(CLI::App* sub, RawFlags& f) {
  sub->add_option("--tol", f.tol, "stage iteration tolerance");
  sub->add_option("--max-iter", f.max_iter, "maximum (or, in fixed mode, exact) number of sweeps");
  sub->add_option("--iteration-mode", f.iteration_mode, "tolerance | fixed")
      ->check(CLI::IsMember({"tolerance", "fixed"}));
  sub->add_option("--path", f.path, "coefficient path: auto | spectral | series")
      ->check(CLI::IsMember({"auto", "spectral", "series"}));
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trigonometric collocation integrator for q'' + M q = f(t, q)", "ltcm-cli"};
  app.set_help_flag("--help", "print this help and exit");  // -h would clash with --h
  app.require_subcommand(1);
  RawFlags flags;
  std::string manifest_path;

  auto* solve_cmd = app.add_subcommand("solve", "integrate one problem and write the trajectory");
  add_common(solve_cmd, flags);
  add_solver(solve_cmd, flags);
  solve_cmd->add_option("--h", flags.h, "step size");

  auto* conv_cmd = app.add_subcommand("convergence", "global error against step size and the fitted order");
  add_common(conv_cmd, flags);
  add_solver(conv_cmd, flags);
  conv_cmd->add_option("--h-list", flags.h_list, "comma-separated step sizes, geometric, at least three")->required();
  conv_cmd->add_option("--reference-n", flags.reference_n, "steps per unit time of the reference solve");

  auto* energy_cmd = app.add_subcommand("energy", "energy error along a trajectory");
  add_common(energy_cmd, flags);
  add_solver(energy_cmd, flags);
  energy_cmd->add_option("--h", flags.h, "step size");

  auto* stab_cmd = app.add_subcommand("stability", "scan the linear stability region");
  stab_cmd->add_option("--nodes", flags.nodes, "comma-separated collocation nodes");
  stab_cmd->add_option("--grid", flags.grid, "grid size NVxNz (default 201x201)");
  stab_cmd->add_option("--v-range", flags.v_range, "V range 'lo,hi' (default 0,100)");
  stab_cmd->add_option("--z-range", flags.z_range, "z range 'lo,hi' (default -5,5)");
  stab_cmd->add_option("--form", flags.form, "stage matrix form: published | node-weighted")
      ->check(CLI::IsMember({"published", "node-weighted"}));
  stab_cmd->add_option("--out", flags.out, "CSV output file (default standard output)");
  stab_cmd->add_option("--write-manifest", flags.write_manifest, "also write the run manifest as JSON");

  auto* coeffs_cmd = app.add_subcommand("coeffs", "dump the coefficient table with a quadrature cross-check");
  add_common(coeffs_cmd, flags);
  coeffs_cmd->add_option("--h", flags.h, "step size");
  coeffs_cmd->add_option("--matrix", flags.matrix, "row-major comma-separated square M (overrides --problem)");
  coeffs_cmd->add_option("--path", flags.path, "coefficient path: auto | spectral | series")
      ->check(CLI::IsMember({"auto", "spectral", "series"}));

  auto* run_cmd = app.add_subcommand("run", "execute a saved JSON manifest");
  run_cmd->add_option("--manifest", manifest_path, "manifest file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0 && e.get_name() != "CallForHelp" && e.get_name() != "CallForAllHelp") {
      err << app.help();
      return kExitUsage;
    }
    return kExitOk;
  }

  try {
    RunManifest m;
    if (run_cmd->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) throw InvalidArgumentError("cannot read manifest '" + manifest_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      m = manifest_from_json(buf.str());
    } else {
      const auto* sub = app.get_subcommands().front();
      m = manifest_from_flags(sub->get_name(), flags);
      if (!flags.write_manifest.empty()) {
        std::ofstream mf(flags.write_manifest);
        if (!mf) throw InvalidArgumentError("cannot write manifest '" + flags.write_manifest + "'");
        mf << manifest_to_json(m);
      }
    }
    return execute(m, out, err);
  } catch (const StepFailure& e) {
    err << "error: " << e.what() << " [step index " << e.step_index() << "]\n";
    return kExitStepFailure;
  } catch (const OracleUnreliableError& e) {
    err << "error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace ltcm::cli
