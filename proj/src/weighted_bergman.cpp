#include "pberg/weighted_bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pberg {

WeightedKernel::WeightedKernel(const Basis& basis, const QuadGrid& grid,
                               const std::vector<double>& density, double max_condition)
    : basis_(basis), grid_(grid) {
  require(density.size() == grid.size(), ErrorCode::Parameter, "density needs one value per node");
  w_.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(std::isfinite(density[i]) && density[i] >= 0.0, ErrorCode::Parameter,
            "weight e^{-phi} must be finite and nonnegative at every node");
    w_[i] = grid.weights[i] * density[i];
  }
  basis_ = orthonormalize(basis, grid, w_, max_condition);
}

Eigen::VectorXcd WeightedKernel::section(cplx z) const {
  return basis_.row(z).adjoint();
}

cplx WeightedKernel::operator()(cplx zeta, cplx z) const {
  return (basis_.row(zeta) * section(z))(0);
}

double WeightedKernel::diag(cplx z) const {
  return basis_.row(z).squaredNorm();
}

cplx WeightedKernel::reproducing_residual(const Eigen::VectorXcd& raw, cplx z) const {
  require(raw.size() == basis_.size(), ErrorCode::Parameter, "coefficient vector has wrong length");
  const Eigen::VectorXcd c = basis_.from_raw(raw);
  const Eigen::MatrixXcd B = basis_.evaluate(grid_.nodes);
  const Eigen::VectorXcd f = B * c;
  const Eigen::VectorXcd k = B * section(z);
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += w_[i] * f[i] * std::conj(k[i]);
  return basis_.value(c, z) - s;
}

WeightedKernel weighted_kernel(const Basis& basis, const QuadGrid& grid,
                               const std::function<double(cplx)>& phi) {
  std::vector<double> density(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) density[i] = std::exp(-phi(grid.nodes[i]));
  return WeightedKernel(basis, grid, density);
}

WeightedKernel weighted_disc_kernel(double p, int N, int n_r, int n_theta) {
  const double a = p * k_cut(p);
  // The origin carries the singular weight; the punctured grid never samples it.
  const Domain d = Domain::punctured_disc();
  const QuadGrid grid = build_grid(d, n_r, n_theta, {.breaks = {}, .grading = default_grading(d, p)});
  return weighted_kernel(Basis::monomial(N), grid,
                         [a](cplx w) { return a * std::log(std::abs(w)); });
}

Thm2Report thm2_residual(const Domain& domain, double p, cplx z, const LabConfig& config) {
  require(p >= 1.0 && p <= 2.0, ErrorCode::Parameter, "the identity is stated for 1 <= p <= 2");
  const KernelLab lab(domain, p, config);
  const LpSolution s = lab.solve_point(z);
  Thm2Report out;
  out.z = z;
  out.p = p;
  out.N = config.N;
  out.K = 1.0 / s.objective;

  const auto density = [&](const Eigen::VectorXcd& m, int& floored) {
    const double floor = 1e-12 * m.cwiseAbs().maxCoeff();
    std::vector<double> d(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      double a = std::abs(m[i]);
      if (a < floor) {
        a = floor;
        ++floored;
      }
      d[i] = std::pow(a, p - 2.0);
    }
    return d;
  };

  const QuadGrid& grid = lab.grid();
  const Eigen::VectorXcd m_main = lab.disc()->eval() * s.coefficients;
  const Eigen::VectorXcd lhs = out.K * m_main;
  const auto sup_error = [&](const WeightedKernel& wk) {
    const Eigen::VectorXcd k = wk.basis().evaluate(grid.nodes) * wk.section(z);
    return (lhs - k).cwiseAbs().maxCoeff() / out.K;
  };

  int unused = 0;
  const WeightedKernel same(lab.basis(), grid, density(m_main, unused));
  out.same_space_residual = sup_error(same);

  const int q = config.grading > 0 ? config.grading : default_grading(domain, p);
  const QuadGrid fine =
      build_grid(domain, 2 * config.n_r, 2 * config.n_theta, {.breaks = {}, .grading = q});
  const Eigen::VectorXcd m_fine = lab.basis().evaluate(fine.nodes) * s.coefficients;
  const WeightedKernel ref(make_basis(domain, p, 2 * config.N), fine,
                           density(m_fine, out.floored_nodes));
  out.residual = sup_error(ref);
  return out;
}

NsMetric::NsMetric(const Domain& domain, double p, const LabConfig& config)
    : lab_(domain, p, config), kernel_(build(lab_, ring_K_)) {}

WeightedKernel NsMetric::build(const KernelLab& lab, std::vector<double>& ring_K) {
  const QuadGrid& grid = lab.grid();
  require(grid.layout.has_value(), ErrorCode::Parameter, "NS metric needs an unmasked polar grid");
  const PolarLayout& L = *grid.layout;
  // K_p is radial here, so one solve per ring gives the exact weight.
  ring_K = par::parallel_map(L.radii.size(), [&](std::size_t k) {
    return lab.kernel_diag(cplx(L.radii[k], 0.0)).value;
  });
  std::vector<double> density(grid.size());
  for (int k = 0; k < L.n_rings(); ++k) {
    for (int j = 0; j < L.n_theta; ++j) density[k * L.n_theta + j] = 1.0 / ring_K[k];
  }
  const Domain& d = lab.domain();
  // 1/K_p ~ |z|^{p k_p} at the puncture admits exactly one pole order.
  const Basis b = d.kind() == DomainKind::PuncturedDisc && lab.p() < 2.0
                      ? Basis::laurent(-1, lab.config().N)
                      : make_basis(d, 2.0, lab.config().N);
  return WeightedKernel(b, grid, density);
}

NsMetricReport NsMetric::coefficient(cplx z) const {
  lab_.check_point(z);
  const LabConfig& cfg = lab_.config();
  const int M = cfg.circle_points;
  const double delta = lab_.domain().boundary_distance(z);
  std::vector<double> radii, q;
  const double u0 = std::log(K2p(z));
  for (double f : cfg.radii_fractions) {
    const double r = f * delta;
    double avg = 0.0;
    for (int j = 0; j < M; ++j) avg += std::log(K2p(z + std::polar(r, 2.0 * std::numbers::pi * j / M)));
    radii.push_back(r);
    q.push_back((avg / M - u0) / (r * r));
  }
  NsMetricReport out;
  out.z = z;
  out.p = lab_.p();
  out.K2p = std::exp(u0);
  out.Kp = lab_.kernel_diag(z).value;
  out.coefficient = richardson_r2(radii, q);
  return out;
}

PoleFit NsMetric::fit_pole(const std::vector<double>& radii) const {
  require(radii.size() >= 3, ErrorCode::Parameter, "pole fit needs at least three radii");
  const auto n = static_cast<Eigen::Index>(radii.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n), k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = radii[i];
    k[i] = K2p(cplx(r, 0.0));
    // Relative least squares: each row scaled by 1/K.
    A.row(i) << 1.0 / (r * r) / k[i], 1.0 / k[i], r * r / k[i];
    y[i] = 1.0;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  require(qr.rank() == 3, ErrorCode::Rank, "pole fit design is rank deficient");
  const Eigen::Vector3d a = qr.solve(y);
  PoleFit out;
  for (int j = 0; j < 3; ++j) out.a[j] = a[j];
  out.max_relative_residual = (A * a - y).cwiseAbs().maxCoeff();
  return out;
}

NsMetricReport ns_metric_coeff(const Domain& domain, double p, cplx z, const LabConfig& config) {
  return NsMetric(domain, p, config).coefficient(z);
}

}  // namespace pberg
