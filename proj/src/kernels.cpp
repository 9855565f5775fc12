#include "pberg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pberg {

namespace {

constexpr double kGeometryFloor = 1e-9;

LpSolution solve_or_last(const LpProblem& prob, const SolverOptions& opts) {
  try {
    return solve(prob, opts);
  } catch (const ConvergenceFailure& e) {
    if (prob.p < 1.0) return e.last_iterate();
    throw;
  }
}

}  // namespace

int default_grading(const Domain& domain, double p) {
  if (domain.kind() != DomainKind::PuncturedDisc || p >= 2.0) return 1;
  const double a = 2.0 - p * k_cut(p);
  for (int q = 1; q <= 6; ++q) {
    const double qa = q * a;
    if (std::abs(qa - std::round(qa)) < 1e-9) return q;
  }
  return 4;
}

BoxEstimate richardson_r2(const std::vector<double>& radii, const std::vector<double>& values) {
  require(radii.size() == values.size() && !radii.empty(), ErrorCode::Parameter,
          "Richardson needs matching non-empty radii and values");
  const std::size_t n = values.size();
  std::vector<std::vector<double>> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i].push_back(values[i]);
    for (std::size_t j = 1; j <= i; ++j) {
      const double q = radii[i - j] / radii[i];
      const double f = q * q;
      t[i].push_back((f * t[i][j - 1] - t[i - 1][j - 1]) / (f - 1.0));
    }
  }
  BoxEstimate out;
  out.radii = radii;
  out.quotients = values;
  out.value = t[n - 1][n - 1];
  if (n >= 3) {
    const double noise = 1e-9 * std::max(1.0, std::abs(out.value));
    const double d1 = values[n - 2] - values[n - 3];
    const double d2 = values[n - 1] - values[n - 2];
    if (std::abs(d1) > noise && std::abs(d2) > noise && (d1 * d2 < 0.0 || std::abs(d2) > 0.5 * std::abs(d1)))
      out.unreliable = true;
    if (std::abs(t[n - 1][n - 2] - out.value) > 1e-2 * std::max(1e-12, std::abs(out.value)))
      out.unreliable = true;
  }
  return out;
}

KernelLab::KernelLab(const Domain& domain, double p, const LabConfig& config)
    : domain_(domain), p_(p), cfg_(config) {
  require(std::isfinite(p) && p > 0.0, ErrorCode::Parameter, "p must be positive");
  require(p >= 1.0 || cfg_.solver.allow_nonconvex, ErrorCode::Parameter,
          "p < 1 is only available in exploratory mode");
  const int q = cfg_.grading > 0 ? cfg_.grading : default_grading(domain, p);
  grid_ = build_grid(domain, cfg_.n_r, cfg_.n_theta, {.breaks = {}, .grading = q});
  disc_ = make_discretization(orthonormalize(make_basis(domain, p, cfg_.N), grid_), grid_);
}

void KernelLab::check_point(cplx z) const {
  if (!(std::isfinite(z.real()) && std::isfinite(z.imag())) ||
      domain_.boundary_distance(z) <= kGeometryFloor) {
    std::ostringstream os;
    os << "point " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i is not inside "
       << domain_.name() << " (boundary distance must exceed " << kGeometryFloor << ")";
    fail(ErrorCode::Geometry, os.str());
  }
}

Eigen::VectorXcd KernelLab::puncture_candidate(cplx z) const {
  // (z/w)^k (h(w)/h(z))^{2/p} with h the L^2 kernel for the weight |w|^{-p k},
  // projected onto the span (the basis is orthonormal for the grid weights).
  const int k = k_cut(p_);
  const double a = p_ * k;
  const auto h = [&](cplx w) {
    const cplx t = w * std::conj(z);
    return (2.0 - a + a * t) / ((1.0 - t) * (1.0 - t));
  };
  const cplx hz = h(z);
  const auto& nodes = disc_->nodes();
  Eigen::VectorXcd g(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    g[i] = disc_->weights()[i] * std::pow(z / nodes[i], k) * std::pow(h(nodes[i]) / hz, 2.0 / p_);
  return disc_->eval().adjoint() * g;
}

LpSolution KernelLab::solve_with_starts(const LpProblem& prob, std::optional<Eigen::VectorXcd> start,
                                        std::optional<cplx> z) const {
  SolverOptions opts = cfg_.solver;
  opts.start = std::move(start);
  if (p_ < 1.0) {
    // Nonconvex: try constants, the p = 1 minimizer and the leading Laurent term.
    const Basis& b = basis();
    Eigen::VectorXcd raw = Eigen::VectorXcd::Zero(b.size());
    const auto& e = b.powers();
    const auto zero = std::find(e.begin(), e.end(), 0) - e.begin();
    raw[zero] = 1.0;
    opts.extra_starts.push_back(b.from_raw(raw));
    LpProblem convex = prob;
    convex.p = 1.0;
    opts.extra_starts.push_back(solve_or_last(convex, cfg_.solver).coefficients);
    if (b.min_power() < 0 && domain_.kind() == DomainKind::PuncturedDisc) {
      raw.setZero();
      raw[0] = 1.0;
      opts.extra_starts.push_back(b.from_raw(raw));
      if (z) opts.extra_starts.push_back(puncture_candidate(*z));
    }
  }
  return solve_or_last(prob, opts);
}

LpSolution KernelLab::solve_point(cplx z, const LpSolution* warm) const {
  check_point(z);
  const LpProblem prob{p_, disc_, {point_constraint(basis(), z, 1.0)}};
  std::optional<Eigen::VectorXcd> start;
  if (warm) {
    const cplx v = basis().value(warm->coefficients, z);
    if (std::abs(v) > 1e-8) start = warm->coefficients / v;
  }
  return solve_with_starts(prob, std::move(start), z);
}

LpSolution KernelLab::solve_metric(cplx z, cplx X, const LpSolution* warm) const {
  check_point(z);
  require(X != cplx(0.0), ErrorCode::Parameter, "direction X must be nonzero");
  const LpProblem prob{p_, disc_,
                       {point_constraint(basis(), z, 0.0), derivative_constraint(basis(), z, X, 1.0)}};
  std::optional<Eigen::VectorXcd> start;
  if (warm) start = warm->coefficients;
  return solve_with_starts(prob, std::move(start));
}

KernelReport KernelLab::kernel_diag(cplx z) const {
  const LpSolution s = solve_point(z);
  KernelReport r;
  r.z = z;
  r.p = p_;
  r.N = cfg_.N;
  r.value = 1.0 / s.objective;
  r.m = s.m;
  r.iterations = s.iterations;
  r.converged = s.converged;
  r.first_order_residual = s.first_order_residual;
  r.nonconvex = s.nonconvex;
  return r;
}

cplx KernelLab::kernel_offdiag(cplx zeta, cplx z) const {
  check_point(zeta);
  const LpSolution s = solve_point(z);
  return basis().value(s.coefficients, zeta) / s.objective;
}

MetricReport KernelLab::metric(cplx z, cplx X) const {
  const LpSolution k = solve_point(z);
  const LpSolution m = solve_metric(z, X);
  MetricReport r;
  r.z = z;
  r.X = X;
  r.p = p_;
  r.N = cfg_.N;
  r.K = 1.0 / k.objective;
  r.m_metric = m.m;
  r.M = 1.0 / m.m;
  r.B = std::pow(r.K, -1.0 / p_) * r.M;
  r.converged = k.converged && m.converged;
  return r;
}

DerivativeIdentity KernelLab::derivative_identity(cplx z, double h) const {
  require(p_ > 1.0, ErrorCode::Parameter, "the derivative identity needs p > 1");
  require(h > 0.0, ErrorCode::Parameter, "finite-difference step must be positive");
  const LpSolution center = solve_point(z);
  const std::vector<double> steps{2 * h, h, 0.5 * h};
  // Points: for each step and axis, z + s and z - s.
  std::vector<cplx> pts;
  for (int axis = 0; axis < 2; ++axis) {
    const cplx dir = axis == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    for (double s : steps) {
      pts.push_back(z + s * dir);
      pts.push_back(z - s * dir);
    }
  }
  for (cplx w : pts) check_point(w);
  const auto K = par::parallel_map(pts.size(), [&](std::size_t i) {
    return 1.0 / solve_point(pts[i], &center).objective;
  });
  DerivativeIdentity out;
  const double K0 = 1.0 / center.objective;
  const cplx dm = K0 * basis().derivative(center.coefficients, z);
  out.rhs[0] = p_ * dm.real();
  out.rhs[1] = -p_ * dm.imag();
  double worst = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    double D[3];
    for (int k = 0; k < 3; ++k) {
      const std::size_t base = axis * 6 + 2 * k;
      D[k] = (K[base] - K[base + 1]) / (2.0 * steps[k]);
    }
    const double R1 = (4.0 * D[1] - D[0]) / 3.0;
    const double R2 = (4.0 * D[2] - D[1]) / 3.0;
    const double R = (16.0 * R2 - R1) / 15.0;
    if (std::abs(R1 - R2) > 1e-6 * std::max(1.0, std::abs(R))) {
      std::ostringstream os;
      os << "finite-difference step h=" << h << " is unreliable: Richardson levels disagree ("
         << R1 << " vs " << R2 << ")";
      fail(ErrorCode::StepSize, os.str());
    }
    out.lhs[axis] = R;
    out.residual[axis] = R - out.rhs[axis];
    worst = std::max(worst, std::abs(out.residual[axis]) / std::max(1.0, std::abs(R)));
  }
  out.relative = worst;
  return out;
}

std::vector<double> KernelLab::circle_radii(cplx z, cplx X) const {
  check_point(z);
  require(X != cplx(0.0), ErrorCode::Parameter, "direction X must be nonzero");
  const double delta = domain_.boundary_distance(z);
  std::vector<double> radii;
  for (double f : cfg_.radii_fractions) radii.push_back(f * delta / std::abs(X));
  return radii;
}

LeviReport KernelLab::levi_log_kernel(cplx z, cplx X) const {
  return levi_log_kernel(z, X, circle_radii(z, X));
}

LeviReport KernelLab::levi_log_kernel(cplx z, cplx X, const std::vector<double>& radii) const {
  require(!radii.empty(), ErrorCode::Parameter, "need at least one radius");
  const int M = cfg_.circle_points;
  require(M >= 4, ErrorCode::Parameter, "need at least 4 circle points");
  const LpSolution center = solve_point(z);
  const double u0 = -std::log(center.objective);
  std::vector<cplx> pts;
  for (double r : radii) {
    for (int j = 0; j < M; ++j)
      pts.push_back(z + r * std::polar(1.0, 2.0 * std::numbers::pi * j / M) * X);
  }
  for (cplx w : pts) check_point(w);
  const auto u = par::parallel_map(pts.size(), [&](std::size_t i) {
    return -std::log(solve_point(pts[i], &center).objective);
  });
  std::vector<double> q;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double avg = 0.0;
    for (int j = 0; j < M; ++j) avg += u[k * M + j];
    avg /= M;
    q.push_back((avg - u0) / (radii[k] * radii[k]));
  }
  LeviReport out;
  out.z = z;
  out.X = X;
  out.p = p_;
  out.levi = richardson_r2(radii, q);
  return out;
}

HscReport KernelLab::hsc_testdisc(cplx z, cplx X) const {
  require(p_ >= 2.0, ErrorCode::Parameter, "the curvature inequality is stated for p >= 2");
  const std::vector<double> radii = circle_radii(z, X);
  const int M = cfg_.circle_points;
  const LpSolution kc = solve_point(z);
  const LpSolution mc = solve_metric(z, X);
  // log B^2 = -(2/p) log K + 2 log M, with log K = -log obj_K and
  // log M = -(1/p) log obj_M.
  auto logs = [&](const LpSolution& k, const LpSolution& m) {
    const double logK = -std::log(k.objective);
    const double logB2 = -(2.0 / p_) * logK - (2.0 / p_) * std::log(m.objective);
    return std::pair{logK, logB2};
  };
  const auto [u0, v0] = logs(kc, mc);
  std::vector<cplx> pts;
  for (double r : radii) {
    for (int j = 0; j < M; ++j)
      pts.push_back(z + r * std::polar(1.0, 2.0 * std::numbers::pi * j / M) * X);
  }
  for (cplx w : pts) check_point(w);
  const auto vals = par::parallel_map(pts.size(), [&](std::size_t i) {
    return logs(solve_point(pts[i], &kc), solve_metric(pts[i], X, &mc));
  });
  std::vector<double> qu, qv;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double au = 0.0, av = 0.0;
    for (int j = 0; j < M; ++j) {
      au += vals[k * M + j].first;
      av += vals[k * M + j].second;
    }
    qu.push_back((au / M - u0) / (radii[k] * radii[k]));
    qv.push_back((av / M - v0) / (radii[k] * radii[k]));
  }
  const BoxEstimate L = richardson_r2(radii, qu);
  const BoxEstimate V = richardson_r2(radii, qv);
  HscReport out;
  out.z = z;
  out.X = X;
  out.p = p_;
  out.B = std::exp(0.5 * v0);
  out.levi = L.value;
  const double B2 = out.B * out.B;
  out.lhs = V.value / (-B2);
  out.rhs = (2.0 / p_) * L.value / B2 + 0.5 * p_;
  out.pass = out.lhs <= out.rhs;
  out.unreliable = L.unreliable || V.unreliable;
  return out;
}

double transform_invariance_residual(double p, cplx z, cplx a, const LabConfig& config) {
  require(std::abs(a) < 1.0, ErrorCode::Parameter, "Moebius parameter must satisfy |a| < 1");
  const KernelLab lab(Domain::unit_disc(), p, config);
  const cplx den = 1.0 - std::conj(a) * z;
  const cplx Fz = (z - a) / den;
  const double dF2 = std::norm((1.0 - std::norm(a)) / (den * den));
  const double K1 = lab.kernel_diag(z).value;
  const double K2 = lab.kernel_diag(Fz).value;
  return std::abs(K1 - K2 * dF2);
}

}  // namespace pberg
