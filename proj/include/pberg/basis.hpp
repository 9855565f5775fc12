#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pberg/domain.hpp"

namespace pberg {

enum class BasisKind { Monomial, Laurent };

/// Finite family of holomorphic functions phi_k = sum_j T(j,k) z^{e_j}.
///
/// The raw exponents e_j are consecutive integers; T starts as the identity
/// and is replaced by orthonormalize().
class Basis {
public:
  static Basis monomial(int max_degree);
  static Basis laurent(int min_power, int max_degree);

  BasisKind kind() const noexcept { return kind_; }
  int min_power() const noexcept { return powers_.front(); }
  int max_power() const noexcept { return powers_.back(); }
  int size() const noexcept { return static_cast<int>(powers_.size()); }
  const std::vector<int>& powers() const noexcept { return powers_; }
  const Eigen::MatrixXcd& transform() const noexcept { return transform_; }

  Basis with_transform(Eigen::MatrixXcd transform) const;

  /// Row of raw powers z^{e_j}.
  Eigen::RowVectorXcd raw_row(cplx z) const;
  Eigen::RowVectorXcd raw_deriv_row(cplx z) const;
  /// Row of basis values phi_k(z).
  Eigen::RowVectorXcd row(cplx z) const { return raw_row(z) * transform_; }
  Eigen::RowVectorXcd deriv_row(cplx z) const { return raw_deriv_row(z) * transform_; }

  /// EvalMatrix B(i,k) = phi_k(points[i]).
  Eigen::MatrixXcd evaluate(const std::vector<cplx>& points) const;
  Eigen::MatrixXcd evaluate_deriv(const std::vector<cplx>& points) const;

  /// Power-series coefficients of sum_k c_k phi_k.
  Eigen::VectorXcd raw_coefficients(const Eigen::VectorXcd& c) const { return transform_ * c; }
  /// Basis coefficients of sum_j raw_j z^{e_j}.
  Eigen::VectorXcd from_raw(const Eigen::VectorXcd& raw) const;
  cplx value(const Eigen::VectorXcd& c, cplx z) const;
  cplx derivative(const Eigen::VectorXcd& c, cplx z) const;

private:
  Basis(BasisKind kind, std::vector<int> powers);

  BasisKind kind_;
  std::vector<int> powers_;
  Eigen::MatrixXcd transform_;
};

/// k_p = largest positive integer below 2/p, for 0 < p < 2.
int k_cut(double p);

/// Monomial(0..N) on discs, Laurent(-k_p..N) on the punctured disc
/// (Monomial when p >= 2), Laurent(-N..N) on the annulus.
Basis make_basis(const Domain& domain, double p, int N);

/// Discrete Gram matrix sum_i w_i conj(phi_j) phi_k over the grid, using
/// the structured kernel when the grid keeps its tensor layout.
Eigen::MatrixXcd gram_matrix(const Basis& basis, const QuadGrid& grid,
                             const std::vector<double>& weights);

/// Returns a basis spanning the same space that is orthonormal for the
/// discrete inner product with the given node weights (grid weights if
/// empty). Throws IllConditioned if the equilibrated Gram condition number
/// exceeds max_condition.
Basis orthonormalize(const Basis& basis, const QuadGrid& grid,
                     const std::vector<double>& weights = {},
                     double max_condition = 1e12);

}  // namespace pberg
