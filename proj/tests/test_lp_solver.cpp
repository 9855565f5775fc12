#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pberg/lp_solver.hpp"

using namespace pberg;
using std::numbers::pi;

namespace {

DiscretizationPtr disc_for(const Domain& d, double p, int N, int n_r = 32, int n_theta = 64,
                           GridOptions opt = {}) {
  const auto grid = build_grid(d, n_r, n_theta, opt);
  return make_discretization(orthonormalize(make_basis(d, p, N), grid), grid);
}

LpProblem point_problem(const DiscretizationPtr& disc, double p, cplx z) {
  return {p, disc, {point_constraint(disc->basis(), z, 1.0)}};
}

}  // namespace

TEST_SUITE("lp_solver") {

TEST_CASE("p=2, f(0)=1 on the disc: minimizer is 1, m^2 = pi") {
  const auto disc = disc_for(Domain::unit_disc(), 2.0, 12);
  const auto s = solve(point_problem(disc, 2.0, 0.0));
  CHECK(std::abs(s.objective - pi) < 1e-12);
  const auto& b = disc->basis();
  for (cplx z : {cplx(0.3, 0.1), cplx(-0.7, 0.2)}) CHECK(std::abs(b.value(s.coefficients, z) - 1.0) < 1e-10);
}

TEST_CASE("p=4, f(0)=1 on the disc: minimizer is 1, m^4 = pi") {
  const auto disc = disc_for(Domain::unit_disc(), 4.0, 12);
  const auto s = solve(point_problem(disc, 4.0, 0.0));
  CHECK(s.converged);
  CHECK(std::abs(s.objective - pi) < 1e-10);
  CHECK(std::abs(disc->basis().value(s.coefficients, cplx(0.5, 0.4)) - 1.0) < 1e-8);
}

TEST_CASE("p=2, f(0)=0, f'(0)=1: minimizer is z, m^2 = pi/2") {
  const auto disc = disc_for(Domain::unit_disc(), 2.0, 12);
  const auto& b = disc->basis();
  const LpProblem prob{2.0, disc, {point_constraint(b, 0.0, 0.0), derivative_constraint(b, 0.0, 1.0, 1.0)}};
  const auto s = solve(prob);
  CHECK(std::abs(s.objective - pi / 2) < 1e-12);
  CHECK(std::abs(b.value(s.coefficients, cplx(0.4, -0.3)) - cplx(0.4, -0.3)) < 1e-10);
}

TEST_CASE("disc minimum matches the closed form pi (1-|z|^2)^2 for every p") {
  // On the disc K_p(z) = 1/(pi (1-|z|^2)^2) independently of p.
  for (double p : {1.0, 1.5, 3.0}) {
    const auto disc = disc_for(Domain::unit_disc(), p, 24);
    for (cplx z : {cplx(0.0), cplx(0.5, 0.0), cplx(-0.2, 0.4)}) {
      const auto s = solve(point_problem(disc, p, z));
      const double expect = pi * std::pow(1.0 - std::norm(z), 2);
      CHECK(s.converged);
      CHECK(std::abs(s.objective - expect) < 1e-6 * expect);
    }
  }
}

TEST_CASE("constraints hold to 1e-10") {
  const auto disc = disc_for(Domain::annulus(0.5), 1.5, 8);
  const auto& b = disc->basis();
  const cplx z(0.6, 0.2);
  const LpProblem prob{1.5, disc, {point_constraint(b, z, 0.0), derivative_constraint(b, z, cplx(0.3, 1.0), 1.0)}};
  const auto s = solve(prob);
  CHECK(std::abs(b.value(s.coefficients, z)) < 1e-10);
  CHECK(std::abs(cplx(0.3, 1.0) * b.derivative(s.coefficients, z) - 1.0) < 1e-10);
}

TEST_CASE("objective is non-increasing across iterations") {
  for (double p : {1.0, 1.3, 2.5, 4.0}) {
    const auto disc = disc_for(Domain::annulus(0.4), p, 8);
    SolverOptions opts;
    opts.record_history = true;
    opts.method = Method::Irls;
    opts.max_iter = 400;
    LpSolution s;
    try {
      s = solve(point_problem(disc, p, cplx(0.7, 0.1)), opts);
    } catch (const ConvergenceFailure& e) {
      s = e.last_iterate();
    }
    for (std::size_t i = 1; i < s.history.size(); ++i) {
      // Stage boundaries (smoothing changes) may raise the smoothed objective.
      if (p > 1.0) REQUIRE(s.history[i] <= s.history[i - 1] * (1 + 1e-14));
    }
    opts.method = Method::Newton;
    s = solve(point_problem(disc, p, cplx(0.7, 0.1)), opts);
    if (p > 1.0) {
      for (std::size_t i = 1; i < s.history.size(); ++i)
        REQUIRE(s.history[i] <= s.history[i - 1] * (1 + 1e-14));
    }
  }
}

TEST_CASE("KKT stationarity at convergence for p >= 1.2") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 6.0}) {
    for (const auto& d : {Domain::unit_disc(), Domain::annulus(0.5)}) {
      const auto disc = disc_for(d, p, 10);
      const auto s = solve(point_problem(disc, p, cplx(0.65, -0.1)));
      INFO("p=" << p << " kind=" << d.name() << " iters=" << s.iterations);
      CHECK(s.first_order_residual < 1e-8);
    }
  }
}

TEST_CASE("p > 1: different starts reach the same minimizer") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (double p : {1.3, 3.0}) {
    const auto disc = disc_for(Domain::annulus(0.5), p, 8);
    const auto prob = point_problem(disc, p, cplx(0.0, 0.75));
    const auto a = solve(prob);
    Eigen::VectorXcd start(disc->size());
    for (auto& x : start) x = cplx(g(rng), g(rng));
    SolverOptions opts;
    opts.start = start;
    const auto b = solve(prob, opts);
    CHECK((a.coefficients - b.coefficients).norm() < 1e-7 * a.coefficients.norm());
  }
}

TEST_CASE("enlarging the basis never increases the objective") {
  const auto grid = build_grid(Domain::annulus(0.3), 32, 64);
  for (double p : {1.0, 1.5, 3.0}) {
    double prev = INFINITY;
    for (int N = 2; N <= 10; N += 2) {
      const auto disc = make_discretization(orthonormalize(make_basis(Domain::annulus(0.3), p, N), grid), grid);
      const double obj = solve(point_problem(disc, p, cplx(0.5, 0.5))).objective;
      CHECK(obj <= prev * (1 + 1e-9));
      prev = obj;
    }
  }
}

TEST_CASE("dependent constraints are a rank error") {
  const auto disc = disc_for(Domain::unit_disc(), 2.0, 6);
  const auto& b = disc->basis();
  const LpProblem prob{2.0, disc, {point_constraint(b, 0.3, 1.0), point_constraint(b, 0.3, 2.0)}};
  try {
    solve(prob);
    FAIL("expected rank error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Rank);
  }
}

TEST_CASE("p < 1 needs the exploratory flag and is marked nonconvex") {
  const auto disc = disc_for(Domain::unit_disc(), 0.8, 10);
  CHECK_THROWS_AS(solve(point_problem(disc, 0.8, 0.3)), Error);
  SolverOptions opts;
  opts.allow_nonconvex = true;
  const auto s = solve(point_problem(disc, 0.8, 0.3), opts);
  CHECK(s.nonconvex);
  CHECK(s.objective > 0.0);
}

TEST_CASE("non-convergence reports the last iterate") {
  const auto disc = disc_for(Domain::annulus(0.5), 1.1, 8);
  SolverOptions opts;
  opts.max_iter = 1;
  opts.method = Method::Irls;
  try {
    solve(point_problem(disc, 1.1, 0.7), opts);
    FAIL("expected convergence failure");
  } catch (const ConvergenceFailure& e) {
    CHECK(e.code() == ErrorCode::Convergence);
    CHECK(e.last_iterate().objective > 0.0);
  }
}

TEST_CASE("reproducing residual examples") {
  {
    const auto disc = disc_for(Domain::unit_disc(), 2.0, 24);
    const auto prob = point_problem(disc, 2.0, 0.4);
    const auto s = solve(prob);
    const auto testf = orthonormalize(Basis::monomial(24), build_grid(Domain::unit_disc(), 32, 64));
    // z^3 in the orthonormal basis: coefficient 1/sqrt(4/pi) on element 3.
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(disc->size());
    c[3] = 1.0 / std::sqrt(4.0 / pi);
    CHECK(std::abs(disc->basis().value(c, 0.5) - 0.125) < 1e-12);
    CHECK(std::abs(reproducing_residual(prob, s, 0.4, c).residual) <= 1e-8);
  }
  {
    const auto disc = disc_for(Domain::unit_disc(), 3.0, 24);
    const auto prob = point_problem(disc, 3.0, 0.0);
    const auto s = solve(prob);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(disc->size());
    c[0] = std::sqrt(pi);
    CHECK(std::abs(reproducing_residual(prob, s, 0.0, c).residual) <= 1e-6);
  }
  {
    double prev = INFINITY;
    for (int N : {8, 16, 24}) {
      const auto disc = disc_for(Domain::unit_disc(), 1.5, N);
      const auto prob = point_problem(disc, 1.5, 0.3);
      const auto s = solve(prob);
      Eigen::VectorXcd c = Eigen::VectorXcd::Zero(disc->size());
      c[1] = 1.0 / std::sqrt(2.0 / pi);
      const double r = std::abs(reproducing_residual(prob, s, 0.3, c).residual);
      CHECK(r <= 1e-3);
      CHECK(r <= std::max(prev, 1e-10));
      prev = r;
    }
  }
}

}
