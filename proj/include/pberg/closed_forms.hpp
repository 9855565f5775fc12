#pragma once

#include <optional>
#include <vector>

#include "pberg/kernels.hpp"

namespace pberg {

/// (1/pi) ((1 - |z|^2)/(1 - conj(z) zeta))^{4/p} (1 - |z|^2)^{-2}, principal branch.
cplx disc_kernel_closed(double p, cplx zeta, cplx z);
/// 1 / (pi (1 - |z|^2)^2).
double disc_diag_closed(double p, cplx z);

/// Two-term expansion of K_p on the punctured disc near the origin.
double punctured_asym(double p, cplx z);

struct PunctureBounds {
  /// Absent when |z| >= (2 - p k_p)/(p k_p), where the lower bound is not claimed.
  std::optional<double> lower;
  double upper = 0.0;
  double rho = 0.0;
};

/// Lower and upper bounds for K_p on the punctured disc; rho defaults to sqrt|z|.
PunctureBounds punctured_bounds(double p, cplx z, std::optional<double> rho = std::nullopt);

struct AsymptoticFit {
  double p = 0.0;
  int k_p = 0;
  std::vector<double> radii;
  std::vector<double> values;
  /// K ~ A |z|^{-p k_p} + B |z|^{2 - p k_p}.
  double A = 0.0;
  double B = 0.0;
  std::vector<double> relative_residuals;
};

/// Relative least-squares fit of the two-term model to (|z|, K_p) samples.
AsymptoticFit fit_puncture(double p, const std::vector<double>& radii, const std::vector<double>& values);

/// Solver values of K_p on the punctured disc at the given radii.
std::vector<double> punctured_samples(double p, const std::vector<double>& radii, const LabConfig& config = {});

/// (2 - p k_p + p k_p w conj(z)) / (2 pi (1 - w conj(z))^2).
cplx weighted_disc_closed(double p, cplx w, cplx z);

struct Corridor {
  double lower = 0.0;
  double upper = 0.0;
};

/// (2-p)/(2 pi R^{2-p}) delta^{-p} <= K_p <= 1/(pi delta^2), R the diameter.
Corridor lemma_b6_bounds(double p, const Domain& domain, cplx z);

struct MeanValueReport {
  /// max over the test functions of |f(a) - average of f over Omega|.
  double max_residual = 0.0;
  /// K_p(a) |Omega|.
  double kernel_times_area = 0.0;
};

/// Mean-value test at a for the raw basis powers up to degree `degree`, and
/// the kernel side K_p(a)|Omega|.
MeanValueReport mean_value_check(const Domain& domain, double p, cplx a, int degree = 8,
                                 const LabConfig& config = {});

struct HardyMeans {
  std::vector<double> radii;
  /// int_{|z|=r} |f|^p ds for each radius; the last radius is 1.
  std::vector<double> means;
  /// ||f||_{H^p}^p, the supremum of the means.
  double norm_pow = 0.0;
};

/// Circle p-means of the polynomial sum_k c_k z^k on r = 1 - 2^{-k}, k = 1..levels, and r = 1.
HardyMeans hardy_means(double p, const Eigen::VectorXcd& coefficients, int levels = 12, int points = 512);
double hardy_norm(double p, const Eigen::VectorXcd& coefficients);

struct Carleman {
  /// int_D |f|^2.
  double lhs = 0.0;
  /// (1/(4 pi)) (int_{dD} |f| ds)^2.
  double rhs = 0.0;
};
Carleman carleman_check(const Eigen::VectorXcd& coefficients);

/// ||f||_{A^{2p}} / ||f||_{H^p} on the unit disc.
double hl_ratio(double p, const Eigen::VectorXcd& coefficients);

/// Szego kernel S(z, z) of the unit circle from a boundary Gram of monomials.
double szego_diag(cplx z, int N = 48, int points = 256);

struct RpExploration {
  double p = 0.0;
  double r_p = 0.0;
  double phi = 0.0;
  /// (r, K_p(r)) on a log-spaced scan.
  std::vector<double> radii;
  std::vector<double> values;
};

/// Minimizer of the radial profile of K_p on the punctured disc (exploratory).
RpExploration rp_exploration(double p, const LabConfig& config = {}, double tol = 1e-5);

}  // namespace pberg
