#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pberg/lp_solver.hpp"

namespace pberg {

struct SchwarzOptions {
  int N = 24;
  int n_r = 32;
  int n_theta = 64;
  /// Starts for the general-p ascent: constant, p = 2 eigenvector, then random.
  int multistarts = 8;
  std::uint64_t seed = 42;
  int max_iter = 500;
};

struct BoundCheck {
  std::string name;
  double value = 0.0;
  bool satisfied = false;
};

struct SchwarzResult {
  std::string region;
  double p = 0.0;
  int N = 0;
  /// Best ratio found: a lower bound for the supremum over the truncated span.
  double s = 0.0;
  /// Largest generalized eigenvalue (p = 2 only).
  std::optional<double> exact_eig;
  /// Power-series coefficients of the best function, normalized to unit L^p norm.
  Eigen::VectorXcd coefficients;
  std::vector<int> powers;
  int multistarts = 0;
  /// |E| / |Omega| on the grid.
  double area_ratio = 0.0;
  std::vector<BoundCheck> bound_checks;
};

/// Largest eigenvalue of G_E in a basis orthonormal over Omega.
double schwarz_p2(const Region& E, const Domain& domain, const SchwarzOptions& options = {});

/// Multistart projected-gradient ascent of int_E |f|^p / int_Omega |f|^p.
SchwarzResult schwarz_general(const Region& E, const Domain& domain, double p,
                              const SchwarzOptions& options = {});

/// First Dirichlet eigenvalue of the Laplacian: j_{0,1}^2 / R^2 on discs.
/// Throws UnsupportedDomain elsewhere.
double first_dirichlet_eigenvalue(const Domain& domain);

/// Appends the two eigenvalue bounds (constants 136 and 128) for E at
/// distance d from the boundary.
void bound_checks(SchwarzResult& result, double d, const Domain& domain = Domain::unit_disc());

/// (1 - s)^{-1/p}.
double bm_bound(double s, double p);

/// Radius r with s_p(D_r, D) = 1/2, by bisection.
double half_content_radius(double p, const SchwarzOptions& options = {}, double tol = 1e-6);

struct ChebyshevDemo {
  double p = 0.0;
  double radius = 0.0;
  /// int_E |f_E|^p and int_{Omega \ E} |f_E|^p with f_E = 1.
  double inside = 0.0;
  double outside = 0.0;
  /// int |g - h|^p for h = 0 and h = 1.
  double dist_h1 = 0.0;
  double dist_h2 = 0.0;
  int candidates = 0;
  double min_candidate = 0.0;
};

/// Two best approximations of g = 1_{Omega \ E} in A^p(D), p <= 1. Throws
/// CounterexampleViolation if a random span element comes closer.
ChebyshevDemo nonchebyshev_demo(double p, int candidates, std::uint64_t seed,
                                const SchwarzOptions& options = {});

struct SchwarzDimFit {
  std::vector<double> eps;
  std::vector<double> one_minus_s;
  /// Least-squares slope of log(1 - s) against log eps.
  double slope = 0.0;
  /// 2 - slope.
  double dimension = 0.0;
};

SchwarzDimFit schwarz_dim_sweep(const Domain& domain, double p, const std::vector<double>& eps,
                                const SchwarzOptions& options = {});

}  // namespace pberg
