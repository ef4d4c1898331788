#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ltcm/cli.hpp"
#include "ltcm/coeffs.hpp"

using namespace ltcm;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ltcm-cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> table;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    table.push_back(cells);
  }
  return table;
}

double summary_value(const std::string& err, const std::string& key) {
  const auto pos = err.find(key + ' ');
  REQUIRE(pos != std::string::npos);
  return std::stod(err.substr(pos + key.size() + 1));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ltcm_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("solve writes one row per step plus a header") {
  const auto r = run({"solve", "--problem", "fpu", "--omega", "100", "--h", "0.01", "--t-end", "10"});
  REQUIRE(r.code == 0);
  const auto t = rows(r.out);
  CHECK(t.size() == 1002);
  CHECK(t[0].front() == "t");
  CHECK(t[0][1] == "q_1");
  CHECK(t[0].back() == "energy");
  CHECK(t[0].size() == 1 + 12 + 2);
  CHECK(std::stod(t.back()[0]) == 10.0);
}

TEST_CASE("wave runs on the series path") {
  const auto r = run({"solve", "--problem", "wave", "--h", "0.03125", "--t-end", "1"});
  CHECK(r.code == 0);
  CHECK(r.err.find("path series") != std::string::npos);
  CHECK(rows(r.out).size() == 34);
}

TEST_CASE("usage errors") {
  auto r = run({"solve", "--problem", "pendulum"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("pendulum") != std::string::npos);
  CHECK(r.err.find("--problem") != std::string::npos);

  r = run({"convergence", "--problem", "fpu", "--h-list", "0.01"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("at least three") != std::string::npos);

  CHECK(run({"solve", "--h", "abc"}).code == cli::kExitUsage);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("step failures exit with their own code") {
  const auto r = run({"solve", "--problem", "satellite", "--h", "0.01", "--t-end", "1"});
  CHECK(r.code == cli::kExitStepFailure);
  CHECK(r.err.find("step index") != std::string::npos);
}

TEST_CASE("energy drift") {
  const auto lin = run({"energy", "--problem", "fpu", "--linear", "--h", "0.01", "--t-end", "10"});
  REQUIRE(lin.code == 0);
  CHECK(summary_value(lin.err, "max_drift") <= 1e-10);

  const auto a = run({"energy", "--problem", "fpu", "--omega", "100", "--h", "0.01", "--t-end", "10"});
  const auto b = run({"energy", "--problem", "fpu", "--omega", "100", "--h", "0.005", "--t-end", "10"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const double ratio = summary_value(a.err, "max_drift") / summary_value(b.err, "max_drift");
  CHECK(ratio >= 11.0);

  const auto kg = run({"energy", "--problem", "klein-gordon", "--h", "0.002", "--t-end", "1"});
  CHECK(kg.code == 0);
  CHECK(rows(kg.out).size() == 502);

  CHECK(run({"energy", "--problem", "wave", "--h", "0.03125", "--t-end", "1"}).code == cli::kExitUsage);
}

TEST_CASE("convergence against a reference solve") {
  const auto r = run({"convergence", "--problem", "fpu", "--omega", "50", "--t-end", "5", "--h-list",
                      "0.025,0.0125,0.00625,0.003125"});
  REQUIRE(r.code == 0);
  const double slope = summary_value(r.err, "slope");
  CHECK(slope >= 3.5);
  CHECK(slope <= 4.5);
  CHECK(rows(r.out).size() == 5);
}

TEST_CASE("coeffs: zero matrix reproduces the Nystrom tableau") {
  const auto r = run({"coeffs", "--matrix", "0", "--h", "0.1"});
  REQUIRE(r.code == 0);
  const auto tab = rkn_tableau(gauss_legendre_2());
  const auto t = rows(r.out);
  REQUIRE(t.size() == 1 + 2 + 2 + 4);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const auto& row = t[k];
    const int j = std::stoi(row[2]) - 1;
    const double v = std::stod(row[5]);
    if (row[0] == "I1") CHECK(std::abs(v - tab.bbar(j)) <= 1e-14);
    if (row[0] == "I2") CHECK(std::abs(v - tab.b(j)) <= 1e-14);
    if (row[0] == "Itilde") CHECK(std::abs(v - tab.Abar(std::stoi(row[1]) - 1, j)) <= 1e-14);
  }
}

TEST_CASE("coeffs: quadrature agreement column") {
  const auto r = run({"coeffs", "--matrix", "100", "--h", "0.1"});
  REQUIRE(r.code == 0);
  const auto t = rows(r.out);
  CHECK(t[0][7] == "abs_diff");
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(std::stod(t[k][7]) <= 1e-10);

  const auto wave = run({"coeffs", "--problem", "wave", "--n", "6", "--h", "0.1"});
  CHECK(wave.code == 0);
  CHECK(wave.err.find("path series") != std::string::npos);
}

TEST_CASE("coeffs: asymmetric matrix on the spectral path") {
  const auto r = run({"coeffs", "--matrix", "1,2,0,1", "--path", "spectral"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("not symmetric") != std::string::npos);
  CHECK(run({"coeffs", "--matrix", "1,2,3"}).code == cli::kExitUsage);
}

TEST_CASE("stability scan output is deterministic") {
  const auto a = run({"stability", "--grid", "21x11"});
  const auto b = run({"stability", "--grid", "21x11"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(rows(a.out).size() == 1 + 21 * 11);
  CHECK(run({"stability", "--grid", "1x5"}).code == cli::kExitUsage);
  CHECK(run({"stability", "--form", "node-weighted", "--grid", "3x3"}).code == 0);
}

TEST_CASE("manifests reproduce identical CSV bytes") {
  const auto manifest = scratch("solve.json");
  const auto first = scratch("first.csv");
  auto r = run({"solve", "--problem", "klein-gordon", "--n", "8", "--h", "0.05", "--t-end", "1", "--out",
                first.string(), "--write-manifest", manifest.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const std::string bytes = slurp(first);
  CHECK(bytes.size() > 100);

  auto m = cli::manifest_from_json(slurp(manifest));
  CHECK(m.command == "solve");
  CHECK(m.n == 8);
  CHECK(cli::manifest_to_json(m) == slurp(manifest));

  std::filesystem::remove(first);
  r = run({"run", "--manifest", manifest.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(first) == bytes);

  CHECK(run({"run", "--manifest", scratch("missing.json").string()}).code == cli::kExitUsage);
}
