#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pberg/kernels.hpp"

using namespace pberg;
using std::numbers::pi;

namespace {

// Independent oracles: the disc p-Bergman kernel and the Bergman kernel of
// the disc of radius R, written out directly.
double disc_diag(cplx z) { return 1.0 / (pi * std::pow(1.0 - std::norm(z), 2)); }

cplx disc_offdiag(double p, cplx zeta, cplx z) {
  const double a = 1.0 - std::norm(z);
  return std::pow(a / (1.0 - std::conj(z) * zeta), 4.0 / p) / (pi * a * a);
}

double disc_R_diag(double R, cplx z) {
  return R * R / (pi * std::pow(R * R - std::norm(z), 2));
}

LabConfig small(int N = 16) {
  LabConfig c;
  c.N = N;
  c.circle_points = 16;
  return c;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("kernel_diag examples on the disc") {
  for (double p : {1.0, 2.0, 3.0}) {
    const KernelLab lab(Domain::unit_disc(), p);
    CHECK(lab.kernel_diag(0.0).value == doctest::Approx(1.0 / pi).epsilon(1e-9));
  }
  const KernelLab lab3(Domain::unit_disc(), 3.0);
  CHECK(lab3.kernel_diag(0.5).value == doctest::Approx(1.0 / (pi * 0.5625)).epsilon(1e-8));
}

TEST_CASE("punctured disc kernel near the puncture has the leading asymptotic size") {
  const KernelLab lab(Domain::punctured_disc(), 1.0);
  const double K = lab.kernel_diag(0.05).value;
  CHECK(std::abs(K - 1.0 / (2 * pi * 0.05)) < 0.02 * K);
}

TEST_CASE("kernel_offdiag examples") {
  const KernelLab lab4(Domain::unit_disc(), 4.0, small());
  for (cplx zeta : {cplx(0.3, 0.2), cplx(-0.6, 0.0)})
    CHECK(std::abs(lab4.kernel_offdiag(zeta, 0.0) - 1.0 / pi) < 1e-8);
  const KernelLab lab2(Domain::unit_disc(), 2.0);
  CHECK(std::abs(lab2.kernel_offdiag(0.6, 0.3) - 1.0 / (pi * 0.82 * 0.82)) < 1e-8);
  const cplx a(0.1, 0.5), b(-0.4, 0.2);
  CHECK(std::abs(lab2.kernel_offdiag(a, b) - std::conj(lab2.kernel_offdiag(b, a))) < 1e-8);
  for (double p : {1.0, 1.5, 3.0}) {
    const KernelLab lab(Domain::unit_disc(), p);
    const cplx v = lab.kernel_offdiag(cplx(0.0, 0.5), 0.2);
    CHECK(std::abs(v - disc_offdiag(p, cplx(0.0, 0.5), 0.2)) < 1e-6 * std::abs(v));
  }
}

TEST_CASE("derivative identity examples") {
  const KernelLab lab2(Domain::unit_disc(), 2.0);
  const auto d = lab2.derivative_identity(0.4, 1e-4);
  const double exact = 4 * 0.4 / (pi * std::pow(1 - 0.16, 3));
  CHECK(std::abs(d.lhs[0] - exact) < 1e-6 * exact);
  CHECK(std::abs(d.rhs[0] - exact) < 1e-6 * exact);
  CHECK(std::abs(d.lhs[1]) < 1e-7);
  CHECK(d.relative < 1e-3);

  const KernelLab lab3(Domain::unit_disc(), 3.0, small());
  const auto d0 = lab3.derivative_identity(0.0, 1e-4);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(d0.lhs[k]) < 1e-7);
    CHECK(std::abs(d0.rhs[k]) < 1e-9);
  }

  const KernelLab ann(Domain::annulus(0.5), 2.0, small(12));
  CHECK(ann.derivative_identity(0.7, 1e-4).relative < 1e-3);
  const KernelLab ann15(Domain::annulus(0.5), 1.5, small(12));
  CHECK(ann15.derivative_identity(cplx(0.1, 0.72), 1e-4).relative < 1e-3);
}

TEST_CASE("too small a step is reported") {
  const KernelLab lab(Domain::unit_disc(), 2.0, small(8));
  try {
    lab.derivative_identity(0.4, 1e-12);
    FAIL("expected a step-size error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepSize);
  }
}

TEST_CASE("metric examples") {
  const KernelLab lab(Domain::unit_disc(), 2.0, small());
  CHECK(lab.metric(0.0, 1.0).B == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(lab.metric(0.0, 2.0).B == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-10));
  // Disc closed form for every p: B_p(z;X) = ((p+2)/2)^{1/p} |X| / (1-|z|^2).
  for (double p : {1.5, 3.0}) {
    const KernelLab l(Domain::unit_disc(), p);
    const cplx z(0.3, -0.2);
    const double expect = std::pow((p + 2) / 2, 1 / p) * 1.5 / (1 - std::norm(z));
    CHECK(l.metric(z, cplx(0.0, 1.5)).B == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("p=4 metric minimizer beats random feasible perturbations") {
  const KernelLab lab(Domain::unit_disc(), 4.0, small(10));
  const auto s = lab.solve_metric(0.0, 1.0);
  const auto& disc = *lab.disc();
  const auto& b = lab.basis();
  // Null space of the two constraints: basis rows at 0 for value and derivative.
  Eigen::MatrixXcd A(2, b.size());
  A.row(0) = b.row(0.0);
  A.row(1) = b.deriv_row(0.0);
  const Eigen::MatrixXcd Z = A.fullPivLu().kernel();
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  int better = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Eigen::VectorXcd y(Z.cols());
    for (auto& v : y) v = cplx(g(rng), g(rng));
    const double scale = std::pow(10.0, -1 - (trial % 5));
    const Eigen::VectorXcd c = s.coefficients + scale * Z * y / y.norm();
    const double obj = par::serial::weighted_pnorm_pow(disc.eval() * c, disc.weights(), 4.0);
    if (obj < s.objective * (1 - 1e-13)) ++better;
  }
  CHECK(better == 0);
  const double B4 = std::pow(pi, 0.25) / s.m;
  CHECK(lab.metric(0.0, 1.0).B == doctest::Approx(B4).epsilon(1e-12));
}

TEST_CASE("Levi form examples") {
  const KernelLab lab(Domain::unit_disc(), 2.0, small());
  const auto L0 = lab.levi_log_kernel(0.0, 1.0);
  CHECK(std::abs(L0.levi.value - 2.0) < 1e-3);
  CHECK_FALSE(L0.levi.unreliable);
  const KernelLab lab3(Domain::unit_disc(), 3.0, small());
  CHECK(std::abs(lab3.levi_log_kernel(0.2, 1.0).levi.value - 2 / std::pow(0.96, 2)) < 5e-3);
  // Homogeneity in X.
  const double a = lab3.levi_log_kernel(cplx(0.1, 0.3), 1.0).levi.value;
  const double b = lab3.levi_log_kernel(cplx(0.1, 0.3), cplx(0.0, 2.0)).levi.value;
  CHECK(b == doctest::Approx(4 * a).epsilon(1e-4));
}

TEST_CASE("curvature inequality on affine test discs") {
  const KernelLab d2(Domain::unit_disc(), 2.0, small());
  const auto h0 = d2.hsc_testdisc(0.0, 1.0);
  CHECK(h0.lhs == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(h0.rhs == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(h0.pass);
  const KernelLab d3(Domain::unit_disc(), 3.0, small());
  CHECK(d3.hsc_testdisc(0.1, 1.0).pass);
  const KernelLab a2(Domain::annulus(0.5), 2.0, small(12));
  CHECK(a2.hsc_testdisc(0.7, 1.0).pass);
}

TEST_CASE("Levi form dominates the squared metric for p >= 2") {
  for (double p : {2.0, 3.0}) {
    const KernelLab lab(Domain::annulus(0.5), p, small(12));
    for (cplx z : {cplx(0.7, 0.0), cplx(0.0, -0.6), cplx(0.55, 0.3)}) {
      const double L = lab.levi_log_kernel(z, cplx(0.6, 0.8)).levi.value;
      const double B = lab.metric(z, cplx(0.6, 0.8)).B;
      CHECK(L >= B * B * (1 - 5e-3));
    }
  }
}

TEST_CASE("transform invariance") {
  CHECK(transform_invariance_residual(2.0, 0.2, 0.3) <= 1e-6);
  CHECK(transform_invariance_residual(3.0, cplx(0.0, 0.1), 0.5) <= 1e-4);
  CHECK(transform_invariance_residual(1.5, cplx(0.3, 0.1), 0.0, small()) == 0.0);
}

TEST_CASE("trivial lower bound K_p >= 1/|Omega|") {
  for (const auto& d : {Domain::annulus(0.5), Domain::punctured_disc(), Domain::disc(0.7)}) {
    for (double p : {1.0, 2.0, 3.0}) {
      const KernelLab lab(d, p, small(12));
      for (cplx z : {cplx(0.45, 0.4) * d.outer_radius(), cplx(-0.9, 0.0) * d.outer_radius(),
                     cplx(0.0, 0.62) * d.outer_radius()})
        CHECK(lab.kernel_diag(z).value >= 1.0 / d.area() - 1e-9);
    }
  }
}

TEST_CASE("smaller domain has the larger kernel") {
  for (double p : {1.0, 2.5}) {
    const KernelLab big(Domain::unit_disc(), p);
    const KernelLab sub(Domain::disc(0.9), p);
    for (cplx z : {cplx(0.0), cplx(0.5, 0.2), cplx(-0.6, 0.0)}) {
      CHECK(disc_R_diag(0.9, z) >= disc_diag(z));
      const double Ks = sub.kernel_diag(z).value;
      CHECK(Ks >= big.kernel_diag(z).value);
      CHECK(Ks == doctest::Approx(disc_R_diag(0.9, z)).epsilon(1e-3));
    }
  }
}

TEST_CASE("t-monotonicity of |Omega|^{1/t} K_t^{1/t}") {
  for (const auto& d : {Domain::annulus(0.5), Domain::punctured_disc()}) {
    for (cplx z : {cplx(0.7, 0.0), cplx(-0.2, 0.6)}) {
      double prev = INFINITY;
      for (double t : {1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        const KernelLab lab(d, t, small(12));
        const double v = std::pow(d.area() * lab.kernel_diag(z).value, 1.0 / t);
        CHECK(v <= prev + 1e-6);
        prev = v;
      }
    }
  }
}

TEST_CASE("continuity in p with a |h log h| modulus") {
  const Domain d = Domain::annulus(0.5);
  const cplx z(0.7, 0.1);
  const double p = 1.5;
  const double K = KernelLab(d, p, small(12)).kernel_diag(z).value;
  auto diff = [&](double h) { return std::abs(KernelLab(d, p + h, small(12)).kernel_diag(z).value - K); };
  const double C = diff(0.1) / (0.1 * (1 + std::abs(std::log(0.1))));
  const double h = 0.01;
  CHECK(diff(h) <= C * h * (1 + std::abs(std::log(h))));
}

TEST_CASE("kernel is nondecreasing in N") {
  for (double p : {1.0, 2.0, 3.0}) {
    double prev = 0.0;
    for (int N : {4, 8, 12, 16}) {
      const double K = KernelLab(Domain::annulus(0.4), p, small(N)).kernel_diag(cplx(0.5, 0.5)).value;
      CHECK(K >= prev * (1 - 1e-10));
      prev = K;
    }
  }
}

TEST_CASE("points outside or on the boundary are geometry errors") {
  const KernelLab lab(Domain::punctured_disc(), 1.0, small(8));
  for (cplx z : {cplx(0.0), cplx(1.0, 0.0), cplx(0.0, 1.2)}) {
    try {
      lab.kernel_diag(z);
      FAIL("expected geometry error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Geometry);
    }
  }
}

TEST_CASE("default grading on the punctured disc") {
  const Domain d = Domain::punctured_disc();
  CHECK(default_grading(d, 1.0) == 1);
  CHECK(default_grading(d, 1.5) == 2);
  CHECK(default_grading(d, 2.0 / 3.0) == 3);
  CHECK(default_grading(d, 1.2) == 5);
  CHECK(default_grading(d, 3.0) == 1);
  CHECK(default_grading(Domain::unit_disc(), 1.5) == 1);
}

TEST_CASE("Richardson extrapolation of an r^2 series") {
  const std::vector<double> r{0.08, 0.04, 0.02};
  std::vector<double> v;
  for (double x : r) v.push_back(2.0 + 3.0 * x * x - 5.0 * std::pow(x, 4));
  const auto e = richardson_r2(r, v);
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(e.unreliable);
  const auto bad = richardson_r2(r, {2.0, 2.5, 1.0});
  CHECK(bad.unreliable);
}

TEST_CASE("exploratory p < 1 is flagged nonconvex") {
  LabConfig c = small(10);
  CHECK_THROWS_AS(KernelLab(Domain::punctured_disc(), 0.8, c), Error);
  c.solver.allow_nonconvex = true;
  const KernelLab lab(Domain::punctured_disc(), 0.8, c);
  const auto r = lab.kernel_diag(0.3);
  CHECK(r.nonconvex);
  CHECK(r.value > 0.0);
}

}
