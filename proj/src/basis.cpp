#include "pberg/basis.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "pberg/error.hpp"
#include "pberg/parallel.hpp"

namespace pberg {

Basis::Basis(BasisKind kind, std::vector<int> powers)
    : kind_(kind), powers_(std::move(powers)) {
  const auto n = static_cast<Eigen::Index>(powers_.size());
  transform_ = Eigen::MatrixXcd::Identity(n, n);
}

Basis Basis::monomial(int max_degree) {
  require(max_degree >= 0, ErrorCode::Parameter, "max degree must be >= 0");
  std::vector<int> e(max_degree + 1);
  std::iota(e.begin(), e.end(), 0);
  return Basis(BasisKind::Monomial, std::move(e));
}

Basis Basis::laurent(int min_power, int max_degree) {
  require(min_power <= 0 && max_degree >= 0, ErrorCode::Parameter,
          "Laurent basis needs min_power <= 0 <= max_degree");
  std::vector<int> e(max_degree - min_power + 1);
  std::iota(e.begin(), e.end(), min_power);
  return Basis(BasisKind::Laurent, std::move(e));
}

Basis Basis::with_transform(Eigen::MatrixXcd transform) const {
  require(transform.rows() == size() && transform.cols() == size(), ErrorCode::Parameter,
          "transform must be square of basis size");
  Basis b = *this;
  b.transform_ = std::move(transform);
  return b;
}

Eigen::RowVectorXcd Basis::raw_row(cplx z) const {
  const int n = size();
  Eigen::RowVectorXcd r(n);
  const int e0 = powers_.front();
  cplx v = 1.0;
  const cplx step = e0 >= 0 ? z : 1.0 / z;
  for (int k = 0; k < std::abs(e0); ++k) v *= step;
  for (int k = 0; k < n; ++k) {
    r[k] = v;
    v *= z;
  }
  return r;
}

Eigen::RowVectorXcd Basis::raw_deriv_row(cplx z) const {
  const int n = size();
  Eigen::RowVectorXcd r(n);
  const Eigen::RowVectorXcd v = raw_row(z);
  for (int k = 0; k < n; ++k) {
    const int e = powers_[k];
    r[k] = e == 0 ? cplx(0.0) : static_cast<double>(e) * v[k] / z;
  }
  // z^{e-1} for e=1 at z=0 is 1, not 0/0.
  if (z == cplx(0.0)) {
    for (int k = 0; k < n; ++k) r[k] = powers_[k] == 1 ? cplx(1.0) : cplx(0.0);
  }
  return r;
}

Eigen::MatrixXcd Basis::evaluate(const std::vector<cplx>& points) const {
  Eigen::MatrixXcd raw(static_cast<Eigen::Index>(points.size()), size());
  for (std::size_t i = 0; i < points.size(); ++i) raw.row(i) = raw_row(points[i]);
  return raw * transform_;
}

Eigen::MatrixXcd Basis::evaluate_deriv(const std::vector<cplx>& points) const {
  Eigen::MatrixXcd raw(static_cast<Eigen::Index>(points.size()), size());
  for (std::size_t i = 0; i < points.size(); ++i) raw.row(i) = raw_deriv_row(points[i]);
  return raw * transform_;
}

Eigen::VectorXcd Basis::from_raw(const Eigen::VectorXcd& raw) const {
  require(raw.size() == size(), ErrorCode::Parameter, "raw coefficient vector has wrong length");
  return transform_.partialPivLu().solve(raw);
}

cplx Basis::value(const Eigen::VectorXcd& c, cplx z) const {
  return (row(z) * c)(0);
}

cplx Basis::derivative(const Eigen::VectorXcd& c, cplx z) const {
  return (deriv_row(z) * c)(0);
}

int k_cut(double p) {
  require(p > 0.0, ErrorCode::Parameter, "p must be positive");
  require(p < 2.0, ErrorCode::Domain, "k_p is only defined for 0 < p < 2");
  const double q = 2.0 / p;
  int k = static_cast<int>(std::ceil(q)) - 1;
  while (k + 1 < q) ++k;
  while (k >= q) --k;
  return k;
}

Basis make_basis(const Domain& domain, double p, int N) {
  require(N >= 2, ErrorCode::Parameter, "basis degree N must be >= 2");
  require(p > 0.0, ErrorCode::Parameter, "p must be positive");
  switch (domain.kind()) {
    case DomainKind::UnitDisc:
    case DomainKind::Disc:
      return Basis::monomial(N);
    case DomainKind::Annulus:
      return Basis::laurent(-N, N);
    case DomainKind::PuncturedDisc:
      if (p >= 2.0) return Basis::monomial(N);
      return Basis::laurent(-k_cut(p), N);
  }
  fail(ErrorCode::UnsupportedDomain, "unknown domain kind");
}

Eigen::MatrixXcd gram_matrix(const Basis& basis, const QuadGrid& grid,
                             const std::vector<double>& weights) {
  const std::vector<double>& w = weights.empty() ? grid.weights : weights;
  require(w.size() == grid.size(), ErrorCode::Parameter, "weight vector size mismatch");
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  Eigen::MatrixXcd raw;
  if (grid.layout) {
    raw = par::GramPlan(*grid.layout, basis.powers()).hermitian(wv);
  } else {
    const Basis plain = basis.with_transform(
        Eigen::MatrixXcd::Identity(basis.size(), basis.size()));
    raw = par::dense_gram_hermitian(plain.evaluate(grid.nodes), wv);
  }
  const Eigen::MatrixXcd& T = basis.transform();
  Eigen::MatrixXcd g = T.adjoint() * raw * T;
  return 0.5 * (g + g.adjoint());
}

Basis orthonormalize(const Basis& basis, const QuadGrid& grid,
                     const std::vector<double>& weights, double max_condition) {
  const Eigen::MatrixXcd g = gram_matrix(basis, grid, weights);
  const int n = basis.size();
  Eigen::VectorXd d(n);
  for (int k = 0; k < n; ++k) {
    const double gkk = g(k, k).real();
    require(gkk > 0.0 && std::isfinite(gkk), ErrorCode::IllConditioned,
            "basis element with zero discrete norm");
    d[k] = 1.0 / std::sqrt(gkk);
  }
  const Eigen::MatrixXcd ge = d.cast<cplx>().asDiagonal() * g * d.cast<cplx>().asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(ge, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > max_condition) {
    std::ostringstream os;
    os << "Gram matrix condition number " << (lo > 0.0 ? hi / lo : INFINITY)
       << " exceeds " << max_condition << " (reduce N)";
    fail(ErrorCode::IllConditioned, os.str());
  }
  const Eigen::LLT<Eigen::MatrixXcd> llt(ge);
  require(llt.info() == Eigen::Success, ErrorCode::IllConditioned,
          "Cholesky of the Gram matrix failed");
  // phi_new = phi D L^{-H}, so that phi_new^H G phi_new = I.
  Eigen::MatrixXcd linv_h = Eigen::MatrixXcd::Identity(n, n);
  llt.matrixU().solveInPlace(linv_h);
  const Eigen::MatrixXcd t = basis.transform() * d.cast<cplx>().asDiagonal() * linv_h;
  return basis.with_transform(t);
}

}  // namespace pberg
