#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ltcm::cli {

/// Exit codes of ltcm-cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;          // bad flags, invalid input, library argument errors
inline constexpr int kExitStepFailure = 2;    // stage iteration did not converge
inline constexpr int kExitOracle = 3;         // reference solve failed its self-check

/// Everything a run depends on. Serializable to JSON; running the same
/// manifest twice produces byte-identical CSV.
struct RunManifest {
  std::string command;  // solve | convergence | energy | stability | coeffs
  std::string problem = "fpu";
  std::optional<double> omega;
  std::optional<int> n;
  std::optional<double> t_end;
  bool linear = false;                 // replace f by 0
  std::vector<double> matrix;          // coeffs: row-major square M instead of a problem
  std::vector<double> nodes;           // empty: Gauss-Legendre 2
  double h = 0.01;
  std::vector<double> h_list;
  double tol = 1e-14;
  int max_iter = 50;
  std::string iteration_mode = "tolerance";  // tolerance | fixed
  std::string path = "auto";                 // auto | spectral | series
  std::optional<int> reference_n;            // convergence: substeps per unit for the reference solve
  std::pair<std::size_t, std::size_t> grid{201, 201};
  std::pair<double, double> v_range{0.0, 100.0};
  std::pair<double, double> z_range{-5.0, 5.0};
  std::string form = "published";            // published | node-weighted
  std::string out;                           // empty: standard output
  unsigned seed = 0;                         // recorded for reproducibility; no command draws random numbers
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

/// Executes a manifest, writing CSV to m.out (or out) and summaries to err.
int execute(const RunManifest& m, std::ostream& out, std::ostream& err);

/// Parses argv (subcommands solve, convergence, energy, stability, coeffs,
/// run) and executes. Never throws; returns an exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ltcm::cli
