#pragma once

#include <optional>
#include <vector>

#include "pberg/lp_solver.hpp"

namespace pberg {

/// Discretization and numerical parameters shared by the kernel routines.
struct LabConfig {
  int N = 24;
  int n_r = 32;
  int n_theta = 64;
  /// Radial grading exponent; 0 selects default_grading().
  int grading = 0;
  SolverOptions solver;
  /// Central-difference step for the derivative identity.
  double fd_step = 1e-4;
  /// Angles per circle in the Box estimator.
  int circle_points = 64;
  /// Circle radii as fractions of the boundary distance (geometric, ratio 2).
  std::vector<double> radii_fractions{0.08, 0.04, 0.02};
};

/// Grading exponent that makes |z|^{-p k_p} area integrals smooth in the
/// graded variable on the punctured disc; 1 elsewhere.
int default_grading(const Domain& domain, double p);

struct KernelReport {
  cplx z;
  double p = 0.0;
  int N = 0;
  /// K_p(z) = m_p(z)^{-p}.
  double value = 0.0;
  double m = 0.0;
  int iterations = 0;
  bool converged = false;
  double first_order_residual = 0.0;
  bool nonconvex = false;
  /// |K^{(N)} - K^{(2N)}| when requested.
  std::optional<double> n_estimate;
};

struct MetricReport {
  cplx z;
  cplx X;
  double p = 0.0;
  int N = 0;
  double m_metric = 0.0;  // m_p(z;X)
  double M = 0.0;         // 1/m_p(z;X)
  double K = 0.0;         // K_p(z)
  double B = 0.0;         // K^{-1/p} M
  bool converged = false;
};

struct DerivativeIdentity {
  /// dK/dx, dK/dy by Richardson-extrapolated central differences.
  double lhs[2] = {0.0, 0.0};
  /// p Re dK(.,z)/dx and p Re dK(.,z)/dy at z.
  double rhs[2] = {0.0, 0.0};
  double residual[2] = {0.0, 0.0};
  /// max |residual| / max(1, |lhs|).
  double relative = 0.0;
};

struct BoxEstimate {
  double value = 0.0;
  /// (average - center) / r^2 for each radius.
  std::vector<double> quotients;
  std::vector<double> radii;
  bool unreliable = false;
};

struct LeviReport {
  cplx z;
  cplx X;
  double p = 0.0;
  /// i ddbar log K_p (z; X).
  BoxEstimate levi;
};

struct HscReport {
  cplx z;
  cplx X;
  double p = 0.0;
  double lhs = 0.0;  // Box log B^2 along z + tX, divided by -B^2
  double rhs = 0.0;  // (2/p) L / B^2 + p/2
  double levi = 0.0;
  double B = 0.0;
  bool pass = false;
  bool unreliable = false;
};

/// Richardson extrapolation of f(r) = a0 + a1 r^2 + a2 r^4 sampled at radii
/// r, r/2, r/4. Flags a tail that is not geometrically shrinking.
BoxEstimate richardson_r2(const std::vector<double>& radii, const std::vector<double>& values);

/// p-Bergman kernel computations on one domain for one exponent. Builds the
/// grid and orthonormal basis once; every method is const and thread-safe.
class KernelLab {
public:
  KernelLab(const Domain& domain, double p, const LabConfig& config = {});

  const Domain& domain() const noexcept { return domain_; }
  double p() const noexcept { return p_; }
  const LabConfig& config() const noexcept { return cfg_; }
  const QuadGrid& grid() const noexcept { return grid_; }
  const DiscretizationPtr& disc() const noexcept { return disc_; }
  const Basis& basis() const noexcept { return disc_->basis(); }

  /// Throws Geometry unless z is inside the domain, away from the boundary.
  void check_point(cplx z) const;

  /// Minimizer of the f(z) = 1 problem; `warm` (a minimizer at a nearby
  /// point) seeds the iteration.
  LpSolution solve_point(cplx z, const LpSolution* warm = nullptr) const;
  /// Minimizer of the f(z) = 0, X f'(z) = 1 problem.
  LpSolution solve_metric(cplx z, cplx X, const LpSolution* warm = nullptr) const;

  /// Extremal candidate from the punctured-disc lower bound, used as a start
  /// for p < 1 (coefficients, not normalized at z).
  Eigen::VectorXcd puncture_candidate(cplx z) const;

  KernelReport kernel_diag(cplx z) const;
  /// K_p(zeta, z) = m_p(zeta, z) K_p(z).
  cplx kernel_offdiag(cplx zeta, cplx z) const;
  MetricReport metric(cplx z, cplx X) const;
  DerivativeIdentity derivative_identity(cplx z, double h) const;
  /// Circle-average estimate of i ddbar log K_p(z; X).
  LeviReport levi_log_kernel(cplx z, cplx X) const;
  LeviReport levi_log_kernel(cplx z, cplx X, const std::vector<double>& radii) const;
  HscReport hsc_testdisc(cplx z, cplx X) const;

private:
  std::vector<double> circle_radii(cplx z, cplx X) const;
  /// Nonconvex problems (p < 1) add further starts; `z` is the point of a
  /// kernel problem.
  LpSolution solve_with_starts(const LpProblem& prob, std::optional<Eigen::VectorXcd> start,
                               std::optional<cplx> z = std::nullopt) const;

  Domain domain_;
  double p_;
  LabConfig cfg_;
  QuadGrid grid_;
  DiscretizationPtr disc_;
};

/// K_p(z) - K_p(F_a(z)) |F_a'(z)|^2 on the unit disc with the automorphism
/// F_a(z) = (z - a)/(1 - conj(a) z).
double transform_invariance_residual(double p, cplx z, cplx a, const LabConfig& config = {});

}  // namespace pberg
