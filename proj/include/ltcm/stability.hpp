#pragma once

// Linear stability of the method on the test equation
//   q'' + omega^2 q = -eps q,   V = h^2 omega^2,   z = h^2 eps,
// whose one-step map acting on (q, h p) is the 2x2 matrix S(V, z).

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ltcm/coeffs.hpp"
#include "ltcm/errors.hpp"
#include "ltcm/lagrange.hpp"
#include "ltcm/matfun.hpp"

namespace ltcm {

/// How the stage matrix A(V) in N = I + z A(V) is formed.
///
/// published:     A_ij = Itilde_ij(V), the block formula as printed.
/// node_weighted: A_ij = c_i^2 Itilde_ij(V), which is what the stage
///                equations apply; S is then exactly the integrator's map.
enum class StageMatrixForm { published, node_weighted };

template <typename Scalar>
struct StabilityMatrix {
  Eigen::Matrix<Scalar, 2, 2> S;
  Scalar trace = Scalar(0);
  Scalar det = Scalar(0);
  Scalar rho = Scalar(0);
};

/// Spectral radius of a real 2x2 matrix from its trace and determinant.
template <typename Scalar>
Scalar spectral_radius_2x2(Scalar trace, Scalar det) {
  using std::abs;
  using std::sqrt;
  const Scalar half = trace / Scalar(2);
  const Scalar disc = half * half - det;
  if (disc < Scalar(0)) return sqrt(det);
  return abs(half) + sqrt(disc);
}

template <typename Scalar>
StabilityMatrix<Scalar> stability_matrix(const BasicNodeSet<Scalar>& ns, Scalar V, Scalar z,
                                         StageMatrixForm form = StageMatrixForm::published) {
  using std::cos;
  using std::sqrt;
  if (V < Scalar(0)) throw InvalidArgumentError("stability_matrix: V must be non-negative");
  const auto s = static_cast<Eigen::Index>(ns.size());
  const Scalar lambda = sqrt(V);

  DenseVector<Scalar> bbar(s), b(s), phi0_c(s), cphi1_c(s);
  DenseMatrix<Scalar> N = DenseMatrix<Scalar>::Identity(s, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    bbar(j) = scalar_kernel(ns, KernelKind::I1, ju, lambda);
    b(j) = scalar_kernel(ns, KernelKind::I2, ju, lambda);
    for (Eigen::Index i = 0; i < s; ++i) {
      const Scalar ci = ns.node(static_cast<std::size_t>(i));
      const Scalar weight = form == StageMatrixForm::node_weighted ? ci * ci : Scalar(1);
      N(i, j) += z * weight * scalar_kernel(ns, KernelKind::Itilde, ju, lambda, static_cast<std::size_t>(i));
    }
  }
  for (Eigen::Index i = 0; i < s; ++i) {
    const Scalar ci = ns.node(static_cast<std::size_t>(i));
    phi0_c(i) = cos(ci * lambda);
    cphi1_c(i) = ci * sinc(ci * lambda);
  }

  Eigen::FullPivLU<DenseMatrix<Scalar>> lu(N);
  if (!lu.isInvertible()) {
    throw SingularStageMatrixError("stability_matrix: N = I + zA(V) is singular", static_cast<double>(V),
                                   static_cast<double>(z));
  }
  const DenseVector<Scalar> x0 = lu.solve(phi0_c);
  const DenseVector<Scalar> x1 = lu.solve(cphi1_c);

  const Scalar phi0 = cos(lambda);
  const Scalar phi1 = sinc(lambda);
  StabilityMatrix<Scalar> out;
  out.S(0, 0) = phi0 - z * bbar.dot(x0);
  out.S(0, 1) = phi1 - z * bbar.dot(x1);
  out.S(1, 0) = -V * phi1 - z * b.dot(x0);
  out.S(1, 1) = phi0 - z * b.dot(x1);
  out.trace = out.S.trace();
  out.det = out.S(0, 0) * out.S(1, 1) - out.S(0, 1) * out.S(1, 0);
  out.rho = spectral_radius_2x2(out.trace, out.det);
  return out;
}

template <typename Scalar>
struct PhaseErrors {
  Scalar dispersion = Scalar(0);   // zeta - arccos(tr S / (2 sqrt(det S)))
  Scalar dissipation = Scalar(0);  // 1 - sqrt(det S)
};

/// Dispersion and dissipation errors at zeta = sqrt(V + z). arccos takes its
/// principal value, so the dispersion error is meaningful for zeta <= pi.
template <typename Scalar>
PhaseErrors<Scalar> dispersion_dissipation(const BasicNodeSet<Scalar>& ns, Scalar V, Scalar z,
                                           StageMatrixForm form = StageMatrixForm::published) {
  using std::abs;
  using std::acos;
  using std::sqrt;
  if (!(V + z > Scalar(0))) throw OutsidePeriodicityError("dispersion_dissipation: requires V + z > 0");
  const auto sm = stability_matrix(ns, V, z, form);
  if (!(sm.det > Scalar(0))) throw OutsidePeriodicityError("dispersion_dissipation: det S must be positive");
  const Scalar root_det = sqrt(sm.det);
  const Scalar arg = sm.trace / (Scalar(2) * root_det);
  if (abs(arg) > Scalar(1)) {
    throw OutsidePeriodicityError("dispersion_dissipation: tr(S) / (2 sqrt(det S)) lies outside [-1, 1]");
  }
  return {sqrt(V + z) - acos(arg), Scalar(1) - root_det};
}

/// Periodicity band on |rho - 1|.
inline constexpr double kPeriodicityTolerance = 1e-9;

struct RegionCell {
  double V = 0.0;
  double z = 0.0;
  double rho = 0.0;
  double trace = 0.0;
  double det = 0.0;
  bool stable = false;    // rho < 1 - 1e-9, strictly inside the periodicity band
  bool periodic = false;  // |rho - 1| <= 1e-9 and tr^2 < 4 det
  bool singular = false;  // N singular; other fields NaN
};

struct ScanGrid {
  std::pair<double, double> V_range{0.0, 100.0};
  std::pair<double, double> z_range{-5.0, 5.0};
  std::size_t V_points = 201;
  std::size_t z_points = 201;
};

/// Evaluates S on a uniform grid, row-major in V then z. Rows are computed
/// in parallel and assembled in grid order.
std::vector<RegionCell> scan_region(const NodeSet& ns, const ScanGrid& grid,
                                    StageMatrixForm form = StageMatrixForm::published);

/// CSV with header V,z,rho,trace,det,stable,periodic.
void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells);

}  // namespace ltcm
