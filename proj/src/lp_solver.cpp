#include "pberg/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pberg {

Discretization::Discretization(Basis basis, const QuadGrid& grid, std::vector<double> weights)
    : basis_(std::move(basis)), nodes_(grid.nodes), layout_(grid.layout) {
  const std::vector<double>& w = weights.empty() ? grid.weights : weights;
  require(w.size() == grid.size(), ErrorCode::Parameter, "weight vector size mismatch");
  w_ = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  B_ = basis_.evaluate(nodes_);
  if (layout_) plan_ = std::make_shared<par::GramPlan>(*layout_, basis_.powers());
}

Eigen::MatrixXcd Discretization::gram_hermitian(const Eigen::VectorXd& a) const {
  if (!plan_) return par::dense_gram_hermitian(B_, a);
  const Eigen::MatrixXcd& T = basis_.transform();
  Eigen::MatrixXcd g = T.adjoint() * plan_->hermitian(a) * T;
  return 0.5 * (g + g.adjoint());
}

Eigen::MatrixXcd Discretization::gram_symmetric(const Eigen::VectorXcd& b) const {
  if (!plan_) return par::dense_gram_symmetric(B_, b);
  const Eigen::MatrixXcd& T = basis_.transform();
  Eigen::MatrixXcd g = T.transpose() * plan_->symmetric(b) * T;
  return 0.5 * (g + g.transpose());
}

std::shared_ptr<const Discretization> Discretization::reweighted(std::vector<double> weights) const {
  require(weights.size() == nodes_.size(), ErrorCode::Parameter, "weight vector size mismatch");
  auto d = std::make_shared<Discretization>(*this);
  d->w_ = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return d;
}

DiscretizationPtr make_discretization(Basis basis, const QuadGrid& grid,
                                      std::vector<double> weights) {
  return std::make_shared<Discretization>(std::move(basis), grid, std::move(weights));
}

Constraint point_constraint(const Basis& basis, cplx z, cplx v) {
  return {basis.row(z), v};
}

Constraint derivative_constraint(const Basis& basis, cplx z, cplx X, cplx v) {
  return {X * basis.deriv_row(z), v};
}

namespace {

// Feasible set c = c0 + Z y with Z orthonormal.
struct Reduced {
  Eigen::VectorXcd c0;
  Eigen::MatrixXcd Z;
};

Reduced reduce(const LpProblem& problem) {
  const int n = problem.disc->size();
  const int k = static_cast<int>(problem.constraints.size());
  require(k <= n, ErrorCode::Rank, "more constraints than basis elements");
  Reduced r;
  if (k == 0) {
    r.c0 = Eigen::VectorXcd::Zero(n);
    r.Z = Eigen::MatrixXcd::Identity(n, n);
    return r;
  }
  Eigen::MatrixXcd A(k, n);
  Eigen::VectorXcd v(k);
  for (int i = 0; i < k; ++i) {
    require(problem.constraints[i].row.size() == n, ErrorCode::Parameter,
            "constraint row has wrong length");
    A.row(i) = problem.constraints[i].row;
    v[i] = problem.constraints[i].rhs;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A.adjoint());
  const double rmax = std::abs(qr.matrixR()(0, 0));
  for (int i = 0; i < k; ++i) {
    require(std::abs(qr.matrixR()(i, i)) > 1e-12 * rmax && rmax > 0.0, ErrorCode::Rank,
            "constraint functionals are linearly dependent");
  }
  const Eigen::MatrixXcd Q = qr.householderQ();
  // A^H P = Q R  =>  A = P R^H Q^H; minimum-norm c0 = Q1 R1^{-H} P^T v.
  const Eigen::MatrixXcd R1 = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::VectorXcd pv = qr.colsPermutation().transpose() * v;
  const Eigen::VectorXcd t = R1.adjoint().triangularView<Eigen::Lower>().solve(pv);
  r.c0 = Q.leftCols(k) * t;
  r.Z = Q.rightCols(n - k);
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  require((A * r.c0 - v).cwiseAbs().maxCoeff() <= 1e-9 * scale, ErrorCode::Rank,
          "constraints are numerically infeasible");
  return r;
}

struct Terms {
  Eigen::VectorXd rho, d1, d2t;  // w*rho, w*rho', w*(rho'' t)
  Eigen::VectorXcd d2f;          // w*rho'' conj(f)^2
};

// rho(t) = (t + eps^2)^{p/2}, all multiplied by the node weight.
class Objective {
public:
  Objective(const LpProblem& problem, double eps)
      : p_(problem.p), eps2_(eps * eps), w_(problem.disc->weights()) {}

  double value(const Eigen::VectorXcd& f) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      if (w_[i] == 0.0) continue;
      const double u = std::norm(f[i]) + eps2_;
      s += w_[i] * (p_ == 2.0 ? u : std::pow(u, 0.5 * p_));
    }
    return s;
  }

  Terms terms(const Eigen::VectorXcd& f, bool second) const {
    const Eigen::Index n = f.size();
    Terms t;
    t.rho.resize(n);
    t.d1.resize(n);
    if (second) {
      t.d2t.resize(n);
      t.d2f.resize(n);
    }
    const double h = 0.5 * p_;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double tt = std::norm(f[i]);
      const double u = tt + eps2_;
      double rho = 0.0, d1 = 0.0, d2 = 0.0;
      if (u > 0.0) {
        const double um = std::pow(u, h - 2.0);
        d2 = h * (h - 1.0) * um;
        d1 = h * um * u;
        rho = d1 * u / h;
      } else if (p_ == 2.0) {
        d1 = 1.0;
      }
      t.rho[i] = w_[i] * rho;
      t.d1[i] = w_[i] * d1;
      if (second) {
        t.d2t[i] = w_[i] * d2 * tt;
        t.d2f[i] = w_[i] * d2 * std::conj(f[i]) * std::conj(f[i]);
      }
    }
    return t;
  }

private:
  double p_;
  double eps2_;
  const Eigen::VectorXd& w_;
};

double exact_objective(const LpProblem& problem, const Eigen::VectorXcd& f) {
  return par::weighted_pnorm_pow(f, problem.disc->weights(), problem.p);
}

double first_order_residual(const LpProblem& problem, const Reduced& red,
                            const Eigen::VectorXcd& f, double objective) {
  const double p = problem.p;
  const auto& w = problem.disc->weights();
  Eigen::VectorXcd r(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    r[i] = a > 0.0 ? w[i] * std::pow(a, p - 2.0) * f[i] : cplx(0.0);
  }
  if (red.Z.cols() == 0 || objective <= 0.0) return 0.0;
  const Eigen::VectorXcd g = red.Z.adjoint() * (problem.disc->eval().adjoint() * r);
  return g.norm() / std::pow(objective, (p - 1.0) / p);
}

struct StageResult {
  Eigen::VectorXcd c;
  int iterations = 0;
  bool converged = false;
};

// One smoothing stage: damped Newton (or IRLS) on the reduced variables.
StageResult run_stage(const LpProblem& problem, const Reduced& red, const SolverOptions& opts,
                      double eps, Eigen::VectorXcd c, std::vector<double>* history) {
  const auto& disc = *problem.disc;
  const auto& B = disc.eval();
  const Objective obj(problem, eps);
  const Eigen::Index m = red.Z.cols();
  StageResult out;
  if (m == 0) {
    out.c = std::move(c);
    out.converged = true;
    return out;
  }
  Eigen::VectorXcd f = B * c;
  double phi = obj.value(f);
  for (int it = 0; it < opts.max_iter; ++it) {
    out.iterations = it + 1;
    const bool newton = opts.method == Method::Newton;
    const Terms t = obj.terms(f, newton);
    const Eigen::VectorXcd g =
        red.Z.adjoint() * (B.adjoint() * (t.d1.cast<cplx>().cwiseProduct(f)));

    Eigen::VectorXcd d;
    bool have = false;
    if (newton) {
      const Eigen::MatrixXcd P = red.Z.adjoint() * disc.gram_hermitian(t.d1 + t.d2t) * red.Z;
      const Eigen::MatrixXcd Q = red.Z.transpose() * disc.gram_symmetric(t.d2f) * red.Z;
      Eigen::MatrixXd H(2 * m, 2 * m);
      H.topLeftCorner(m, m) = P.real() + Q.real();
      H.topRightCorner(m, m) = -P.imag() - Q.imag();
      H.bottomLeftCorner(m, m) = P.imag() - Q.imag();
      H.bottomRightCorner(m, m) = P.real() - Q.real();
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::VectorXd rhs(2 * m);
      rhs.head(m) = -g.real();
      rhs.tail(m) = -g.imag();
      const Eigen::LLT<Eigen::MatrixXd> llt(H);
      if (llt.info() == Eigen::Success) {
        const Eigen::VectorXd x = llt.solve(rhs);
        d = x.head(m).cast<cplx>() + cplx(0.0, 1.0) * x.tail(m).cast<cplx>();
        have = d.allFinite() && (g.adjoint() * d)(0).real() < 0.0;
      }
    }
    if (!have) {
      // Reweighted least-squares step; a majorizer when p <= 2.
      const Eigen::MatrixXcd P0 = red.Z.adjoint() * disc.gram_hermitian(t.d1) * red.Z;
      const Eigen::LDLT<Eigen::MatrixXcd> ldlt(P0);
      d = -ldlt.solve(g);
      if (problem.p > 2.0) d /= (problem.p - 1.0);
    }

    const double slope = 2.0 * (g.adjoint() * d)(0).real();
    const double decrement = -slope;
    if (!(decrement >= 0.0) || !std::isfinite(decrement)) break;
    if (newton && decrement <= opts.tol * phi) {
      // Inside the quadratic regime the full step is exact to rounding;
      // a line search would only compare noise.
      c += red.Z * d;
      out.converged = true;
      if (history) history->push_back(phi);
      break;
    }
    // Armijo backtracking keeps the smoothed objective non-increasing.
    const Eigen::VectorXcd Bd = B * (red.Z * d);
    double alpha = 1.0;
    double phi_new = obj.value(f + Bd);
    while (phi_new > phi + 1e-4 * alpha * slope && alpha > 1e-12) {
      alpha *= 0.5;
      phi_new = obj.value(f + alpha * Bd);
    }
    if (phi_new > phi) {
      // No representable decrease left.
      out.converged = decrement <= std::sqrt(opts.tol) * phi;
      break;
    }
    c += alpha * (red.Z * d);
    f = B * c;
    const double change = (phi - phi_new) / std::max(phi, 1e-300);
    phi = phi_new;
    if (history) history->push_back(phi);
    const bool done = newton ? decrement <= opts.tol * phi : change < opts.tol;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.c = std::move(c);
  return out;
}

LpSolution finish(const LpProblem& problem, const Reduced& red, Eigen::VectorXcd c, double eps,
                  double eps_floor) {
  LpSolution s;
  s.p = problem.p;
  const Eigen::VectorXcd f = problem.disc->eval() * c;
  s.coefficients = std::move(c);
  s.objective = exact_objective(problem, f);
  s.m = std::pow(s.objective, 1.0 / problem.p);
  s.first_order_residual = first_order_residual(problem, red, f, s.objective);
  s.smoothing = eps;
  const double floor = std::max(eps, eps_floor * f.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (problem.disc->weights()[i] > 0.0 && std::abs(f[i]) < floor) ++s.floored_nodes;
  }
  return s;
}

LpSolution solve_from(const LpProblem& problem, const Reduced& red, const SolverOptions& opts,
                      Eigen::VectorXcd c) {
  const double p = problem.p;
  std::vector<double> history;
  std::vector<double>* hist = opts.record_history ? &history : nullptr;
  const auto scale = [&](const Eigen::VectorXcd& cc) {
    return (problem.disc->eval() * cc).cwiseAbs().maxCoeff();
  };
  std::vector<double> stages;
  if (p > 2.0 || p == 2.0) {
    stages = {0.0};
  } else if (p > 1.0) {
    // A second, much smaller smoothing removes the O(eps) bias in the
    // first-order condition; the first stage keeps early steps well scaled.
    stages = {opts.eps_floor, 1e-4 * opts.eps_floor};
  } else {
    stages = {1e-2, 1e-4, 1e-6};
    if (opts.eps_floor < 1e-6) stages.push_back(opts.eps_floor);
  }
  // Below p = 1 the objective is not convex: a pole makes max|f| a poor
  // smoothing scale, and the best iterate seen is kept.
  const bool nonconvex = p < 1.0;
  const auto lp_mean = [&](const Eigen::VectorXcd& cc) {
    const auto& w = problem.disc->weights();
    return std::pow(exact_objective(problem, problem.disc->eval() * cc) / w.sum(), 1.0 / p);
  };
  int iters = 0;
  bool converged = false;
  double eps = 0.0;
  Eigen::VectorXcd best = c;
  double best_obj = exact_objective(problem, problem.disc->eval() * c);
  double best_eps = 0.0;
  for (double rel : stages) {
    eps = rel * (nonconvex ? lp_mean(c) : scale(c));
    const StageResult r = run_stage(problem, red, opts, eps, std::move(c), hist);
    c = r.c;
    iters += r.iterations;
    converged = r.converged;
    const double obj = exact_objective(problem, problem.disc->eval() * c);
    if (!nonconvex || obj < best_obj) {
      best = c;
      best_obj = obj;
      best_eps = eps;
    }
  }
  if (nonconvex) {
    c = best;
    eps = best_eps;
  }
  LpSolution s = finish(problem, red, std::move(c), eps, opts.eps_floor);
  s.iterations = iters;
  s.converged = converged;
  s.nonconvex = p < 1.0;
  s.history = std::move(history);
  return s;
}

}  // namespace

LpSolution solve(const LpProblem& problem, const SolverOptions& opts) {
  require(problem.disc != nullptr, ErrorCode::Parameter, "problem has no discretization");
  const double p = problem.p;
  require(std::isfinite(p) && p > 0.0, ErrorCode::Parameter, "p must be positive");
  require(p >= 1.0 || opts.allow_nonconvex, ErrorCode::Parameter,
          "p < 1 is only available in exploratory mode");
  require(opts.max_iter >= 1 && opts.tol > 0.0 && opts.eps_floor > 0.0, ErrorCode::Parameter,
          "invalid solver options");
  const Reduced red = reduce(problem);
  const auto& disc = *problem.disc;

  // Weighted L^2 minimizer: the p = 2 answer and the default start.
  Eigen::VectorXcd c2 = red.c0;
  if (red.Z.cols() > 0) {
    const Eigen::MatrixXcd G = disc.gram_hermitian(disc.weights());
    const Eigen::MatrixXcd P = red.Z.adjoint() * G * red.Z;
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(P);
    c2 += red.Z * ldlt.solve(-(red.Z.adjoint() * (G * red.c0)));
  }
  if (p == 2.0 && !opts.start) {
    LpSolution s = finish(problem, red, c2, 0.0, opts.eps_floor);
    s.iterations = 1;
    s.converged = true;
    return s;
  }

  auto project = [&](const Eigen::VectorXcd& c) -> Eigen::VectorXcd {
    require(c.size() == disc.size(), ErrorCode::Parameter, "start vector has wrong length");
    return red.c0 + red.Z * (red.Z.adjoint() * (c - red.c0));
  };

  std::vector<Eigen::VectorXcd> starts{opts.start ? project(*opts.start) : c2};
  for (const auto& s : opts.extra_starts) starts.push_back(project(s));

  std::optional<LpSolution> best;
  for (const auto& s : starts) {
    LpSolution cand = solve_from(problem, red, opts, s);
    if (!best || (cand.converged && !best->converged) ||
        (cand.converged == best->converged && cand.objective < best->objective)) {
      best = std::move(cand);
    }
  }
  if (!best->converged) {
    std::ostringstream os;
    os << "L^p solver (p=" << p << ") did not converge in " << opts.max_iter
       << " iterations per stage; last objective " << best->objective;
    throw ConvergenceFailure(os.str(), *best);
  }
  return *best;
}

ReproducingResidual reproducing_residual(const LpProblem& problem, const LpSolution& solution,
                                         cplx z, const Eigen::VectorXcd& testf,
                                         double eps_floor) {
  const auto& disc = *problem.disc;
  const double p = problem.p;
  const Eigen::VectorXcd m = disc.eval() * solution.coefficients;
  const Eigen::VectorXcd f = disc.eval() * testf;
  const double floor = eps_floor * m.cwiseAbs().maxCoeff();
  ReproducingResidual out;
  cplx integral = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double w = disc.weights()[i];
    if (w == 0.0) continue;
    double a = std::abs(m[i]);
    if (a < floor) {
      ++out.clamped_nodes;
      if (p < 2.0) a = floor;
    }
    if (a == 0.0) continue;
    integral += w * std::pow(a, p - 2.0) * std::conj(m[i]) * f[i];
  }
  const double K = 1.0 / solution.objective;
  out.residual = disc.basis().value(testf, z) - K * integral;
  return out;
}

}  // namespace pberg
