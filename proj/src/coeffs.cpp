#include "ltcm/coeffs.hpp"

#include <cmath>
#include <string>

#include "ltcm/quadrature.hpp"

namespace ltcm {

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::I1: return "I1";
    case KernelKind::I2: return "I2";
    case KernelKind::Itilde: return "Itilde";
  }
  return "?";
}

const char* to_string(CoefficientPath path) {
  return path == CoefficientPath::spectral ? "spectral" : "series";
}

double quadrature_oracle(const NodeSet& ns, KernelKind kind, std::size_t j, std::size_t i, double V) {
  if (V < 0.0) throw InvalidArgumentError("quadrature_oracle: V must be non-negative");
  detail::check_indices(ns, kind, j, i);
  const double lambda = std::sqrt(V);
  const double ci = ns.node(kind == KernelKind::Itilde ? i : 0);
  auto integrand = [&](double z) -> double {
    const double w = 1.0 - z;
    switch (kind) {
      case KernelKind::I1: return eval_basis(ns, j, z) * w * sinc(w * lambda);
      case KernelKind::I2: return eval_basis(ns, j, z) * std::cos(w * lambda);
      case KernelKind::Itilde: return eval_basis(ns, j, ci * z) * w * sinc(w * ci * lambda);
    }
    return 0.0;
  };
  return integrate_adaptive(integrand, 0.0, 1.0, 1e-13).value;
}

namespace {

CoefficientTable empty_table(const NodeSet& ns, const Eigen::MatrixXd& M, double h, CoefficientPath path) {
  const std::size_t s = ns.size();
  const Eigen::Index d = M.rows();
  CoefficientTable t{ns, M, h, path, {}, {}, {}, {}, {}, {}};
  t.I1.assign(s, Eigen::MatrixXd::Zero(d, d));
  t.I2.assign(s, Eigen::MatrixXd::Zero(d, d));
  t.Itilde.assign(s, std::vector<Eigen::MatrixXd>(s, Eigen::MatrixXd::Zero(d, d)));
  t.phi_stage.resize(s);
  return t;
}

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgumentError("coefficient table: h must be positive and finite");
}

}  // namespace

CoefficientTable build_table_spectral(const NodeSet& ns, const SpectralDecomposition<double>& sd, double h) {
  check_step(h);
  const std::size_t s = ns.size();
  const Eigen::Index d = sd.dimension();
  CoefficientTable t = empty_table(ns, sd.reconstruct(), h, CoefficientPath::spectral);

  const Eigen::MatrixXd& P = sd.P;
  auto congruence = [&P](const Eigen::VectorXd& diag) -> Eigen::MatrixXd {
    Eigen::MatrixXd out = P.transpose() * diag.asDiagonal() * P;
    return 0.5 * (out + out.transpose());
  };

  Eigen::VectorXd diag(d);
  for (std::size_t j = 0; j < s; ++j) {
    for (Eigen::Index k = 0; k < d; ++k) diag(k) = scalar_kernel(ns, KernelKind::I1, j, h * sd.lambda(k));
    t.I1[j] = congruence(diag);
    for (Eigen::Index k = 0; k < d; ++k) diag(k) = scalar_kernel(ns, KernelKind::I2, j, h * sd.lambda(k));
    t.I2[j] = congruence(diag);
    for (std::size_t i = 0; i < s; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) diag(k) = scalar_kernel(ns, KernelKind::Itilde, j, h * sd.lambda(k), i);
      t.Itilde[i][j] = congruence(diag);
    }
  }

  t.phi_main = phi_pair_spectral(sd, h);
  for (std::size_t i = 0; i < s; ++i) t.phi_stage[i] = phi_pair_spectral(sd, ns.node(i) * h);
  for (Eigen::Index k = 0; k < d; ++k) diag(k) = sd.lambda(k) * sd.lambda(k) * sinc(h * sd.lambda(k));
  t.M_phi1 = congruence(diag);
  return t;
}

CoefficientTable build_table_series(const NodeSet& ns, const Eigen::MatrixXd& M, double h) {
  check_step(h);
  if (M.rows() != M.cols()) throw InvalidArgumentError("build_table_series: M must be square");
  const Eigen::MatrixXd V = h * h * M;
  const double vnorm = inf_norm(V);
  if (vnorm > kSeriesNormGuard) {
    throw SeriesDivergenceError("build_table_series: ||h^2 M||_inf = " + std::to_string(vnorm) +
                                " exceeds the series guard " + std::to_string(kSeriesNormGuard) +
                                "; reduce h");
  }
  const std::size_t s = ns.size();
  const Eigen::Index d = M.rows();
  CoefficientTable t = empty_table(ns, M, h, CoefficientPath::series);
  t.phi_main = {Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d), 1.0};
  for (std::size_t i = 0; i < s; ++i) {
    t.phi_stage[i] = {Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d), ns.node(i)};
  }

  std::vector<double> c2(s), c2_pow(s, 1.0);
  for (std::size_t i = 0; i < s; ++i) c2[i] = ns.node(i) * ns.node(i);

  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);  // (-V)^l / (2l)!
  for (int l = 0;; ++l) {
    if (l > kMaxSeriesTerms) throw SeriesDivergenceError("build_table_series: no convergence");
    if (l > 0) term = (term * V).eval() * (-1.0 / (double(2 * l - 1) * double(2 * l)));
    const auto n = static_cast<std::size_t>(2 * l);
    const double odd = 1.0 / double(2 * l + 1);

    t.phi_main.phi0 += term;
    t.phi_main.phi1 += odd * term;
    for (std::size_t j = 0; j < s; ++j) {
      t.I1[j] += (odd * basis_moment(ns, j, 1.0, n + 1)) * term;
      t.I2[j] += basis_moment(ns, j, 1.0, n) * term;
    }
    for (std::size_t i = 0; i < s; ++i) {
      t.phi_stage[i].phi0 += c2_pow[i] * term;
      t.phi_stage[i].phi1 += (c2_pow[i] * odd) * term;
      for (std::size_t j = 0; j < s; ++j) {
        t.Itilde[i][j] += (c2_pow[i] * odd * basis_moment(ns, j, ns.node(i), n + 1)) * term;
      }
      c2_pow[i] *= c2[i];
    }
    if (l > 0 && max_abs(term) < 1e-18 * (1.0 + max_abs(t.phi_main.phi0))) break;
  }
  t.M_phi1 = M * t.phi_main.phi1;
  return t;
}

}  // namespace ltcm
