#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pberg/basis.hpp"
#include "pberg/error.hpp"
#include "pberg/parallel.hpp"

namespace pberg {

/// A basis evaluated on a quadrature grid with (possibly reweighted or
/// masked) node weights. Shared read-only by many solves.
class Discretization {
public:
  Discretization(Basis basis, const QuadGrid& grid, std::vector<double> weights = {});

  const Basis& basis() const noexcept { return basis_; }
  const std::vector<cplx>& nodes() const noexcept { return nodes_; }
  const Eigen::VectorXd& weights() const noexcept { return w_; }
  /// EvalMatrix B(i,k) = phi_k(node_i).
  const Eigen::MatrixXcd& eval() const noexcept { return B_; }
  int size() const noexcept { return basis_.size(); }
  bool structured() const noexcept { return plan_ != nullptr; }

  /// sum_i a_i conj(phi_j) phi_k  and  sum_i b_i phi_j phi_k.
  Eigen::MatrixXcd gram_hermitian(const Eigen::VectorXd& a) const;
  Eigen::MatrixXcd gram_symmetric(const Eigen::VectorXcd& b) const;

  /// Same discretization with different node weights (layout kept).
  std::shared_ptr<const Discretization> reweighted(std::vector<double> weights) const;

private:
  Basis basis_;
  std::vector<cplx> nodes_;
  Eigen::VectorXd w_;
  Eigen::MatrixXcd B_;
  std::shared_ptr<const par::GramPlan> plan_;
  std::optional<PolarLayout> layout_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

DiscretizationPtr make_discretization(Basis basis, const QuadGrid& grid,
                                      std::vector<double> weights = {});

/// Linear functional row . c = rhs on the coefficient vector.
struct Constraint {
  Eigen::RowVectorXcd row;
  cplx rhs;
};

/// f(z) = v.
Constraint point_constraint(const Basis& basis, cplx z, cplx v);
/// X f'(z) = v.
Constraint derivative_constraint(const Basis& basis, cplx z, cplx X, cplx v);

struct LpProblem {
  double p = 2.0;
  DiscretizationPtr disc;
  std::vector<Constraint> constraints;
};

enum class Method { Newton, Irls };

struct SolverOptions {
  double tol = 1e-11;
  int max_iter = 300;
  double eps_floor = 1e-8;
  Method method = Method::Newton;
  /// Accept 0 < p < 1 (exploratory, no optimality claim).
  bool allow_nonconvex = false;
  /// Starting coefficients (projected onto the constraint set).
  std::optional<Eigen::VectorXcd> start;
  /// Further starting points; the best local minimum is returned.
  std::vector<Eigen::VectorXcd> extra_starts;
  /// Record the smoothed objective after every iteration.
  bool record_history = false;
};

struct LpSolution {
  Eigen::VectorXcd coefficients;
  double p = 2.0;
  /// sum_i w_i |f_i|^p (unsmoothed), i.e. m^p.
  double objective = 0.0;
  double m = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Null-space gradient norm of the unsmoothed objective, relative.
  double first_order_residual = 0.0;
  /// Nodes with |f_i| below the smoothing floor at the end.
  int floored_nodes = 0;
  double smoothing = 0.0;
  bool nonconvex = false;
  std::vector<double> history;
};

class ConvergenceFailure : public Error {
public:
  ConvergenceFailure(const std::string& what, LpSolution last)
    : Error(ErrorCode::Convergence, what), last_(std::move(last)) {}
  const LpSolution& last_iterate() const noexcept { return last_; }

private:
  LpSolution last_;
};

/// Minimizes sum_i w_i |f(node_i)|^p over the basis span subject to the
/// constraints. Throws Rank for dependent/infeasible constraints and
/// ConvergenceFailure when max_iter is exhausted.
LpSolution solve(const LpProblem& problem, const SolverOptions& opts = {});

struct ReproducingResidual {
  cplx residual;
  int clamped_nodes = 0;
};

/// f(z) - K_p(z) sum_i w_i |m|^{p-2} conj(m) f  for the minimizer m of the
/// problem with the single constraint f(z) = 1 and a test function f given
/// by its basis coefficients.
ReproducingResidual reproducing_residual(const LpProblem& problem, const LpSolution& solution,
                                         cplx z, const Eigen::VectorXcd& testf,
                                         double eps_floor = 1e-8);

}  // namespace pberg
