#pragma once

#include <functional>
#include <vector>

#include "pberg/kernels.hpp"

namespace pberg {

/// Reproducing kernel of the span of `basis` in L^2(density * dA), where
/// density = e^{-phi} is given at the grid nodes.
class WeightedKernel {
public:
  WeightedKernel(const Basis& basis, const QuadGrid& grid, const std::vector<double>& density,
                 double max_condition = 1e12);

  /// Orthonormal basis of the weighted space.
  const Basis& basis() const noexcept { return basis_; }
  const QuadGrid& grid() const noexcept { return grid_; }
  /// Node weights times density.
  const std::vector<double>& weights() const noexcept { return w_; }

  cplx operator()(cplx zeta, cplx z) const;
  double diag(cplx z) const;
  /// Coefficients (in basis()) of K(., z).
  Eigen::VectorXcd section(cplx z) const;

  /// f(z) - sum_i w_i f(node_i) conj(K(node_i, z)) for f given by raw
  /// power coefficients over the original exponents.
  cplx reproducing_residual(const Eigen::VectorXcd& raw, cplx z) const;

private:
  Basis basis_;
  QuadGrid grid_;
  std::vector<double> w_;
};

/// Density from a weight function: e^{-phi(node)}.
WeightedKernel weighted_kernel(const Basis& basis, const QuadGrid& grid,
                               const std::function<double(cplx)>& phi);

/// Weighted kernel of the unit disc for phi = p k_p log|w|, built on a grid
/// graded for the |w|^{-p k_p} singularity.
WeightedKernel weighted_disc_kernel(double p, int N, int n_r, int n_theta);

struct Thm2Report {
  cplx z;
  double p = 0.0;
  int N = 0;
  double K = 0.0;
  /// sup over grid nodes of |K_p(., z) - K_{2,p,z}(., z)| / K_p(z), with the
  /// weighted kernel built on a basis of degree 2N and a refined grid.
  double residual = 0.0;
  /// Same quantity with the weighted kernel on the solver's own span.
  double same_space_residual = 0.0;
  int floored_nodes = 0;
};

/// Compares K_p(., z) with the L^2 kernel for the weight |m_p(., z)|^{p-2}.
Thm2Report thm2_residual(const Domain& domain, double p, cplx z, const LabConfig& config = {});

struct NsMetricReport {
  cplx z;
  double p = 0.0;
  double K2p = 0.0;
  double Kp = 0.0;
  /// ddbar log K_{2,p}(z), the coefficient of ds^2_p.
  BoxEstimate coefficient;
};

struct PoleFit {
  /// K_{2,p}(z) ~ a[0] |z|^{-2} + a[1] + a[2] |z|^2.
  double a[3] = {0.0, 0.0, 0.0};
  double max_relative_residual = 0.0;
};

/// Weighted kernel K_{2,p} = K_{Omega, log K_p}. On these rotationally
/// symmetric domains K_p is radial, so the weight 1/K_p is computed exactly
/// with one solve per quadrature ring.
class NsMetric {
public:
  NsMetric(const Domain& domain, double p, const LabConfig& config = {});

  double K2p(cplx z) const { return kernel_.diag(z); }
  double Kp_ring(int ring) const { return ring_K_[ring]; }
  const WeightedKernel& kernel() const noexcept { return kernel_; }
  const KernelLab& lab() const noexcept { return lab_; }

  NsMetricReport coefficient(cplx z) const;
  /// Least-squares fit of the Laurent model on the punctured disc.
  PoleFit fit_pole(const std::vector<double>& radii) const;

private:
  static WeightedKernel build(const KernelLab& lab, std::vector<double>& ring_K);

  KernelLab lab_;
  std::vector<double> ring_K_;
  WeightedKernel kernel_;
};

NsMetricReport ns_metric_coeff(const Domain& domain, double p, cplx z, const LabConfig& config = {});

}  // namespace pberg
