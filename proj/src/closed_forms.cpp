#include "pberg/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pberg {

namespace {

constexpr double kPi = std::numbers::pi;

void require_unit(cplx z, const char* what) {
  require(std::abs(z) < 1.0, ErrorCode::Range, std::string(what) + " must lie in the unit disc");
}

void require_puncture_range(double p, cplx z) {
  require(p > 0.0 && p < 2.0, ErrorCode::Range, "punctured-disc formulas need 0 < p < 2");
  const double r = std::abs(z);
  require(r > 0.0 && r < 1.0, ErrorCode::Range, "punctured-disc formulas need 0 < |z| < 1");
}

}  // namespace

cplx disc_kernel_closed(double p, cplx zeta, cplx z) {
  require(p > 0.0, ErrorCode::Parameter, "p must be positive");
  require_unit(zeta, "zeta");
  require_unit(z, "z");
  const double a = 1.0 - std::norm(z);
  return std::pow(a / (1.0 - std::conj(z) * zeta), 4.0 / p) / (kPi * a * a);
}

double disc_diag_closed(double p, cplx z) {
  require(p > 0.0, ErrorCode::Parameter, "p must be positive");
  require_unit(z, "z");
  const double a = 1.0 - std::norm(z);
  return 1.0 / (kPi * a * a);
}

double punctured_asym(double p, cplx z) {
  require_puncture_range(p, z);
  const double a = p * k_cut(p);
  const double r = std::abs(z);
  return (2.0 - a) / (2.0 * kPi * std::pow(r, a)) + (4.0 - a) / (2.0 * kPi) * std::pow(r, 2.0 - a);
}

PunctureBounds punctured_bounds(double p, cplx z, std::optional<double> rho) {
  require_puncture_range(p, z);
  const double a = p * k_cut(p);
  const double r = std::abs(z);
  const double r2 = r * r;
  PunctureBounds out;
  out.rho = rho.value_or(std::sqrt(r));
  require(out.rho > r && out.rho <= 1.0, ErrorCode::Range, "rho must lie in (|z|, 1]");
  if (r < (2.0 - a) / a) out.lower = (2.0 - a + a * r2) / (2.0 * kPi * std::pow(r, a) * (1.0 - r2) * (1.0 - r2));
  const double t = r2 / (out.rho * out.rho);
  out.upper = (2.0 - a + a * t) / (2.0 * kPi * std::pow(r, a) * (1.0 - t) * (1.0 - t));
  return out;
}

AsymptoticFit fit_puncture(double p, const std::vector<double>& radii, const std::vector<double>& values) {
  require(p > 0.0 && p < 2.0, ErrorCode::Range, "the expansion needs 0 < p < 2");
  require(radii.size() == values.size(), ErrorCode::Parameter, "radii and values differ in length");
  require(radii.size() >= 4, ErrorCode::Parameter, "fit needs at least four samples");
  AsymptoticFit f;
  f.p = p;
  f.k_p = k_cut(p);
  f.radii = radii;
  f.values = values;
  const double a = p * f.k_p;
  const auto n = static_cast<Eigen::Index>(radii.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = radii[i];
    require(r >= 1e-3 * (1 - 1e-12) && r <= 0.2 * (1 + 1e-12), ErrorCode::Range,
            "fit radii must lie in [1e-3, 0.2]");
    require(values[i] > 0.0, ErrorCode::Parameter, "kernel samples must be positive");
    // Relative residuals scaled by 1/r^2, the size of the neglected
    // O(r^{4-a}) term relative to r^{2-a}, so large radii do not bias B.
    const double s = 1.0 / (values[i] * r * r);
    X(i, 0) = std::pow(r, -a) * s;
    X(i, 1) = std::pow(r, 2.0 - a) * s;
    y[i] = 1.0 / (r * r);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  require(qr.rank() == 2, ErrorCode::Rank, "asymptotic fit design is rank deficient");
  const Eigen::Vector2d c = qr.solve(y);
  f.A = c[0];
  f.B = c[1];
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = radii[i];
    f.relative_residuals.push_back((f.A * std::pow(r, -a) + f.B * std::pow(r, 2.0 - a)) / values[i] - 1.0);
  }
  return f;
}

std::vector<double> punctured_samples(double p, const std::vector<double>& radii, const LabConfig& config) {
  LabConfig cfg = config;
  if (p < 1.0) cfg.solver.allow_nonconvex = true;
  const KernelLab lab(Domain::punctured_disc(), p, cfg);
  return par::parallel_map(radii.size(), [&](std::size_t i) {
    return lab.kernel_diag(cplx(radii[i], 0.0)).value;
  });
}

cplx weighted_disc_closed(double p, cplx w, cplx z) {
  require(p > 0.0 && p < 2.0, ErrorCode::Range, "the weighted disc formula needs 0 < p < 2");
  require_unit(w, "w");
  require_unit(z, "z");
  const double a = p * k_cut(p);
  const cplx t = w * std::conj(z);
  return (2.0 - a + a * t) / (2.0 * kPi * (1.0 - t) * (1.0 - t));
}

Corridor lemma_b6_bounds(double p, const Domain& domain, cplx z) {
  require(p > 0.0 && p < 2.0, ErrorCode::Range, "the bounds are stated for 0 < p < 2");
  require(domain.contains(z), ErrorCode::Geometry, "point is not inside the domain");
  const double delta = domain.boundary_distance(z);
  const double R = domain.diameter();
  return {(2.0 - p) / (2.0 * kPi * std::pow(R, 2.0 - p)) * std::pow(delta, -p),
          1.0 / (kPi * delta * delta)};
}

MeanValueReport mean_value_check(const Domain& domain, double p, cplx a, int degree,
                                 const LabConfig& config) {
  require(p >= 1.0, ErrorCode::Parameter, "mean-value check needs p >= 1");
  const KernelLab lab(domain, p, config);
  lab.check_point(a);
  MeanValueReport out;
  const QuadGrid& g = lab.grid();
  const double area = domain.area();
  const Basis basis = make_basis(domain, p, std::max(degree, 2));
  for (int e : basis.powers()) {
    if (e > degree) continue;
    cplx avg = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) avg += g.weights[i] * std::pow(g.nodes[i], e);
    avg /= area;
    out.max_residual = std::max(out.max_residual, std::abs(std::pow(a, e) - avg));
  }
  out.kernel_times_area = lab.kernel_diag(a).value * area;
  return out;
}

HardyMeans hardy_means(double p, const Eigen::VectorXcd& coefficients, int levels, int points) {
  require(p > 0.0, ErrorCode::Parameter, "p must be positive");
  require(levels >= 1 && points >= 8, ErrorCode::Parameter, "need levels >= 1 and points >= 8");
  require(coefficients.size() > 0, ErrorCode::Parameter, "empty polynomial");
  HardyMeans out;
  for (int k = 1; k <= levels; ++k) out.radii.push_back(1.0 - std::ldexp(1.0, -k));
  out.radii.push_back(1.0);
  for (double r : out.radii) {
    double s = 0.0;
    for (int j = 0; j < points; ++j) {
      const cplx z = std::polar(r, 2.0 * kPi * j / points);
      cplx f = 0.0;
      for (Eigen::Index k = coefficients.size() - 1; k >= 0; --k) f = f * z + coefficients[k];
      s += std::pow(std::abs(f), p);
    }
    out.means.push_back(s * 2.0 * kPi * r / points);
  }
  out.norm_pow = *std::max_element(out.means.begin(), out.means.end());
  return out;
}

double hardy_norm(double p, const Eigen::VectorXcd& coefficients) {
  return std::pow(hardy_means(p, coefficients).norm_pow, 1.0 / p);
}

namespace {

// Area integral of |f|^q over the unit disc, exact for |f|^2 of this degree.
double area_pnorm_pow(double q, const Eigen::VectorXcd& c) {
  const int d = static_cast<int>(c.size()) - 1;
  const QuadGrid g = build_grid(Domain::unit_disc(), std::max(24, 2 * d + 8), std::max(64, 8 * d + 16));
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    cplx f = 0.0;
    for (int k = d; k >= 0; --k) f = f * g.nodes[i] + c[k];
    s += g.weights[i] * std::pow(std::abs(f), q);
  }
  return s;
}

}  // namespace

Carleman carleman_check(const Eigen::VectorXcd& coefficients) {
  require(coefficients.size() > 0, ErrorCode::Parameter, "empty polynomial");
  Carleman out;
  out.lhs = area_pnorm_pow(2.0, coefficients);
  const double l1 = hardy_means(1.0, coefficients, 1, 1024).means.back();
  out.rhs = l1 * l1 / (4.0 * kPi);
  return out;
}

double hl_ratio(double p, const Eigen::VectorXcd& coefficients) {
  require(p > 0.0, ErrorCode::Parameter, "p must be positive");
  const double a = std::pow(area_pnorm_pow(2.0 * p, coefficients), 1.0 / (2.0 * p));
  return a / hardy_norm(p, coefficients);
}

double szego_diag(cplx z, int N, int points) {
  require_unit(z, "z");
  const QuadGrid b = boundary_grid(Domain::unit_disc(), points);
  QuadGrid circle;
  circle.nodes = b.boundary_nodes;
  circle.weights = b.boundary_weights;
  const Basis ortho = orthonormalize(Basis::monomial(N), circle);
  return ortho.row(z).squaredNorm();
}

RpExploration rp_exploration(double p, const LabConfig& config, double tol) {
  require(p > 0.0 && p < 2.0, ErrorCode::Range, "r_p is defined for 0 < p < 2");
  LabConfig cfg = config;
  if (p < 1.0) cfg.solver.allow_nonconvex = true;
  const KernelLab lab(Domain::punctured_disc(), p, cfg);
  const auto K = [&](double r) { return lab.kernel_diag(cplx(r, 0.0)).value; };
  RpExploration out;
  out.p = p;
  const int n = 24;
  for (int i = 0; i < n; ++i) out.radii.push_back(0.05 * std::pow(0.95 / 0.05, double(i) / (n - 1)));
  out.values = par::parallel_map(out.radii.size(), [&](std::size_t i) { return K(out.radii[i]); });
  const auto it = std::min_element(out.values.begin(), out.values.end());
  const auto i = static_cast<std::size_t>(it - out.values.begin());
  double a = out.radii[i == 0 ? 0 : i - 1];
  double b = out.radii[std::min(i + 1, out.radii.size() - 1)];
  // Golden-section search on the bracketing interval.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = K(x1), f2 = K(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = K(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = K(x2);
    }
  }
  out.r_p = 0.5 * (a + b);
  out.phi = K(out.r_p);
  return out;
}

}  // namespace pberg
