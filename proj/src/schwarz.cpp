#include "pberg/schwarz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pberg/rng.hpp"

namespace pberg {

namespace {

constexpr double kJ01 = 2.404825557695773;

// Basis orthonormal over Omega on a grid whose radial panels follow E.
struct ContentProblem {
  Basis basis;
  Eigen::MatrixXcd B;
  Eigen::VectorXd w_omega;
  Eigen::VectorXd w_e;
  double area_ratio = 0.0;
};

ContentProblem setup(const Region& E, const Domain& domain, double p, const SchwarzOptions& o) {
  const QuadGrid grid = build_grid(domain, o.n_r, o.n_theta, {.breaks = E.radial_breaks(), .grading = 1});
  const std::vector<double> we = masked_weights(grid, E);
  ContentProblem cp{orthonormalize(make_basis(domain, p, o.N), grid), {}, {}, {}, 0.0};
  cp.B = cp.basis.evaluate(grid.nodes);
  cp.w_omega = Eigen::Map<const Eigen::VectorXd>(grid.weights.data(), static_cast<Eigen::Index>(grid.size()));
  cp.w_e = Eigen::Map<const Eigen::VectorXd>(we.data(), static_cast<Eigen::Index>(we.size()));
  const double area_e = cp.w_e.sum();
  require(area_e > 0.0, ErrorCode::EmptyRegion, "region " + E.describe() + " contains no grid nodes");
  cp.area_ratio = area_e / cp.w_omega.sum();
  return cp;
}

Eigen::VectorXcd top_eigenvector(const ContentProblem& cp, double& value) {
  const Eigen::MatrixXcd g = par::dense_gram_hermitian(cp.B, cp.w_e);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (g + g.adjoint()));
  const Eigen::Index n = g.rows();
  value = eig.eigenvalues()[n - 1];
  return eig.eigenvectors().col(n - 1);
}

struct Ascent {
  Eigen::VectorXcd c;
  double ratio = 0.0;
};

Ascent ascend(const ContentProblem& cp, double p, Eigen::VectorXcd c, int max_iter) {
  const auto normalize = [&](Eigen::VectorXcd& x, Eigen::VectorXcd& f) {
    f = cp.B * x;
    const double den = par::weighted_pnorm_pow(f, cp.w_omega, p);
    require(den > 0.0 && std::isfinite(den), ErrorCode::Convergence, "ascent reached f = 0");
    const double s = std::pow(den, -1.0 / p);
    x *= s;
    f *= s;
  };
  Eigen::VectorXcd f;
  normalize(c, f);
  double R = par::weighted_pnorm_pow(f, cp.w_e, p);
  for (int it = 0; it < max_iter; ++it) {
    const double floor = 1e-12 * f.cwiseAbs().maxCoeff();
    Eigen::VectorXcd a(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double m = std::max(std::abs(f[i]), floor);
      a[i] = (cp.w_e[i] - R * cp.w_omega[i]) * std::pow(m, p - 2.0) * f[i];
    }
    const Eigen::VectorXcd d = cp.B.adjoint() * a;
    if (d.norm() <= 1e-10 * std::max(R, 1e-300)) break;
    // |c|^2 / R is the power-iteration step at p = 2; halve until R grows.
    double alpha = c.squaredNorm() / std::max(R, 1e-300);
    bool improved = false;
    while (alpha > 1e-14) {
      Eigen::VectorXcd ct = c + alpha * d, ft;
      normalize(ct, ft);
      const double Rt = par::weighted_pnorm_pow(ft, cp.w_e, p);
      require(std::isfinite(Rt), ErrorCode::Convergence, "ascent produced a non-finite ratio");
      if (Rt > R) {
        const double gain = Rt - R;
        c = std::move(ct);
        f = std::move(ft);
        R = Rt;
        improved = gain > 1e-10 * R;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
  }
  return {c, R};
}

}  // namespace

double schwarz_p2(const Region& E, const Domain& domain, const SchwarzOptions& options) {
  const ContentProblem cp = setup(E, domain, 2.0, options);
  double v = 0.0;
  top_eigenvector(cp, v);
  return v;
}

SchwarzResult schwarz_general(const Region& E, const Domain& domain, double p,
                              const SchwarzOptions& options) {
  require(std::isfinite(p) && p >= 1.0, ErrorCode::Parameter, "Schwarz ascent needs p >= 1");
  require(options.multistarts >= 1, ErrorCode::Parameter, "need at least one start");
  const ContentProblem cp = setup(E, domain, p, options);
  const Basis& b = cp.basis;

  std::vector<Eigen::VectorXcd> starts;
  Eigen::VectorXcd raw = Eigen::VectorXcd::Zero(b.size());
  const auto& e = b.powers();
  raw[std::find(e.begin(), e.end(), 0) - e.begin()] = 1.0;
  starts.push_back(b.from_raw(raw));
  double eig = 0.0;
  const Eigen::VectorXcd top = top_eigenvector(cp, eig);
  if (options.multistarts > 1) starts.push_back(top);
  auto rng = seeded_rng(options.seed, 1);
  std::normal_distribution<double> gauss;
  while (static_cast<int>(starts.size()) < options.multistarts) {
    Eigen::VectorXcd c(b.size());
    for (auto& x : c) x = cplx(gauss(rng), gauss(rng));
    starts.push_back(c);
  }

  const auto runs = par::parallel_map(starts.size(), [&](std::size_t i) {
    return ascend(cp, p, starts[i], options.max_iter);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].ratio > runs[best].ratio) best = i;
  }
  SchwarzResult r;
  r.region = E.describe();
  r.p = p;
  r.N = options.N;
  r.s = runs[best].ratio;
  if (p == 2.0) r.exact_eig = eig;
  r.coefficients = b.raw_coefficients(runs[best].c);
  r.powers = b.powers();
  r.multistarts = static_cast<int>(starts.size());
  r.area_ratio = cp.area_ratio;
  return r;
}

double first_dirichlet_eigenvalue(const Domain& domain) {
  if (domain.kind() != DomainKind::UnitDisc && domain.kind() != DomainKind::Disc)
    fail(ErrorCode::UnsupportedDomain, "first Dirichlet eigenvalue is tabulated for discs only");
  const double R = domain.outer_radius();
  return kJ01 * kJ01 / (R * R);
}

void bound_checks(SchwarzResult& result, double d, const Domain& domain) {
  require(d >= 0.0, ErrorCode::Parameter, "distance to the boundary must be nonnegative");
  const double lambda = first_dirichlet_eigenvalue(domain);
  for (double c : {136.0, 128.0}) {
    const double a = c / lambda;
    const double bound = a / (a + d * d);
    std::ostringstream name;
    name << "eigenvalue-" << static_cast<int>(c);
    result.bound_checks.push_back({name.str(), bound, result.s <= bound});
  }
}

double bm_bound(double s, double p) {
  require(std::isfinite(p) && p >= 1.0, ErrorCode::Parameter, "p must be >= 1");
  require(s >= 0.0, ErrorCode::Parameter, "content must be nonnegative");
  require(s < 1.0, ErrorCode::Undefined, "content 1 gives an infinite Banach-Mazur bound");
  return std::pow(1.0 - s, -1.0 / p);
}

double half_content_radius(double p, const SchwarzOptions& options, double tol) {
  SchwarzOptions o = options;
  o.multistarts = std::min(o.multistarts, 2);
  const Domain d = Domain::unit_disc();
  const auto g = [&](double r) {
    const RegionPtr E = Region::sub_disc(r);
    const double s = p == 2.0 ? schwarz_p2(*E, d, o) : schwarz_general(*E, d, p, o).s;
    return s - 0.5;
  };
  double lo = 0.05, hi = 0.95;
  double glo = g(lo), ghi = g(hi);
  require(glo < 0.0 && ghi > 0.0, ErrorCode::Bracketing,
          "content minus 1/2 does not change sign on [0.05, 0.95]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ChebyshevDemo nonchebyshev_demo(double p, int candidates, std::uint64_t seed,
                                const SchwarzOptions& options) {
  require(p > 0.0 && p <= 1.0, ErrorCode::Parameter, "the construction needs 0 < p <= 1");
  require(candidates >= 0, ErrorCode::Parameter, "candidate count must be nonnegative");
  ChebyshevDemo out;
  out.p = p;
  out.radius = std::sqrt(0.5);
  const Domain d = Domain::unit_disc();
  const RegionPtr E = Region::sub_disc(out.radius);
  const QuadGrid grid =
      build_grid(d, options.n_r, options.n_theta, {.breaks = E->radial_breaks(), .grading = 1});
  const std::vector<char> in = membership(grid, *E);
  // f_E = 1 maximizes the content, so |f_E|^p = 1 on both pieces.
  for (std::size_t i = 0; i < grid.size(); ++i) (in[i] ? out.inside : out.outside) += grid.weights[i];
  const auto dist = [&](const Eigen::VectorXcd& h) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const cplx g = in[i] ? 0.0 : 1.0;
      s += grid.weights[i] * std::pow(std::abs(g - h[i]), p);
    }
    return s;
  };
  const auto n = static_cast<Eigen::Index>(grid.size());
  out.dist_h1 = dist(Eigen::VectorXcd::Zero(n));
  out.dist_h2 = dist(Eigen::VectorXcd::Ones(n));

  const Basis b = Basis::monomial(options.N);
  const Eigen::MatrixXcd B = b.evaluate(grid.nodes);
  auto rng = seeded_rng(seed, 2);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::VectorXcd> hs;
  for (int k = 0; k < candidates; ++k) {
    // Perturbations of the two minimizers, their convex combinations, and
    // unstructured polynomials.
    Eigen::VectorXcd c(b.size());
    for (int j = 0; j < b.size(); ++j) c[j] = cplx(gauss(rng), gauss(rng)) / (1.0 + j);
    const double scale = std::pow(10.0, -3.0 * unif(rng));
    c *= (k % 3 == 2) ? 1.0 : scale;
    if (k % 3 != 2) c[0] += unif(rng);
    hs.push_back(c);
  }
  const auto d_all = par::parallel_map(hs.size(), [&](std::size_t k) { return dist(B * hs[k]); });
  out.candidates = candidates;
  out.min_candidate = d_all.empty() ? out.dist_h1 : *std::min_element(d_all.begin(), d_all.end());
  const double target = 0.5 * std::numbers::pi;
  for (std::size_t k = 0; k < d_all.size(); ++k) {
    if (d_all[k] < target - 1e-6) {
      std::ostringstream os;
      os << "candidate " << k << " is at distance " << d_all[k] << " < pi/2";
      fail(ErrorCode::CounterexampleViolation, os.str());
    }
  }
  return out;
}

SchwarzDimFit schwarz_dim_sweep(const Domain& domain, double p, const std::vector<double>& eps,
                                const SchwarzOptions& options) {
  if (domain.kind() != DomainKind::UnitDisc)
    fail(ErrorCode::UnsupportedDomain, "boundary-layer sweeps use concentric subdiscs of the unit disc");
  require(eps.size() >= 2, ErrorCode::Parameter, "need at least two eps values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    require(eps[i] > 0.0 && eps[i] < 0.3, ErrorCode::Parameter, "eps must lie in (0, 0.3)");
    require(i == 0 || eps[i] < eps[i - 1], ErrorCode::Parameter, "eps list must be decreasing");
  }
  SchwarzDimFit out;
  out.eps = eps;
  for (double e : eps) {
    const RegionPtr E = Region::sub_disc(1.0 - e);
    const double s = p == 2.0 ? schwarz_p2(*E, domain, options) : schwarz_general(*E, domain, p, options).s;
    require(s > 0.0 && s < 1.0, ErrorCode::Range, "content outside (0, 1) in sweep");
    out.one_minus_s.push_back(1.0 - s);
  }
  const auto n = static_cast<Eigen::Index>(eps.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(eps[i]);
    y[i] = std::log(out.one_minus_s[i]);
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  out.slope = coef[1];
  out.dimension = 2.0 - out.slope;
  return out;
}

}  // namespace pberg
