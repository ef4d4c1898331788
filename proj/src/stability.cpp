#include "ltcm/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "ltcm/csv.hpp"

namespace ltcm {

namespace {

double grid_point(std::pair<double, double> range, std::size_t k, std::size_t n) {
  if (n == 1) return range.first;
  if (k + 1 == n) return range.second;
  return range.first + (range.second - range.first) * static_cast<double>(k) / static_cast<double>(n - 1);
}

RegionCell evaluate_cell(const NodeSet& ns, double V, double z, StageMatrixForm form) {
  RegionCell cell;
  cell.V = V;
  cell.z = z;
  try {
    const auto sm = stability_matrix(ns, V, z, form);
    cell.rho = sm.rho;
    cell.trace = sm.trace;
    cell.det = sm.det;
    cell.stable = sm.rho < 1.0 - kPeriodicityTolerance;
    cell.periodic = std::abs(sm.rho - 1.0) <= kPeriodicityTolerance && sm.trace * sm.trace < 4.0 * sm.det;
  } catch (const SingularStageMatrixError&) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    cell.rho = cell.trace = cell.det = nan;
    cell.singular = true;
  }
  return cell;
}

}  // namespace

std::vector<RegionCell> scan_region(const NodeSet& ns, const ScanGrid& grid, StageMatrixForm form) {
  if (grid.V_points < 2 || grid.z_points < 2) throw InvalidArgumentError("scan_region: grid must be at least 2x2");
  if (grid.V_range.first < 0.0 || grid.V_range.second < grid.V_range.first || grid.z_range.second < grid.z_range.first) {
    throw InvalidArgumentError("scan_region: invalid ranges (V must be non-negative)");
  }
  std::vector<RegionCell> cells(grid.V_points * grid.z_points);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), grid.V_points));
  auto run_rows = [&](std::size_t first) {
    for (std::size_t iv = first; iv < grid.V_points; iv += workers) {
      const double V = grid_point(grid.V_range, iv, grid.V_points);
      for (std::size_t iz = 0; iz < grid.z_points; ++iz) {
        cells[iv * grid.z_points + iz] = evaluate_cell(ns, V, grid_point(grid.z_range, iz, grid.z_points), form);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_rows, w);
  run_rows(0);
  for (auto& t : pool) t.join();
  return cells;
}

void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells) {
  os << "V,z,rho,trace,det,stable,periodic\n";
  for (const auto& c : cells) {
    os << format_double(c.V) << ',' << format_double(c.z) << ',' << format_double(c.rho) << ','
       << format_double(c.trace) << ',' << format_double(c.det) << ',' << (c.stable ? 1 : 0) << ','
       << (c.periodic ? 1 : 0) << '\n';
  }
}

}  // namespace ltcm
