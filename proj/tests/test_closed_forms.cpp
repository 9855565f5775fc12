#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pberg/closed_forms.hpp"

using namespace pberg;
using std::numbers::pi;

namespace {

std::vector<double> log_radii(int n, double lo = 1e-3, double hi = 0.2) {
  std::vector<double> r;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return r;
}

// Exact integrals for f = sum a_k z^k on the unit disc and circle.
double area_l2(const Eigen::VectorXcd& a) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) s += std::norm(a[k]) * pi / (k + 1.0);
  return s;
}

}  // namespace

TEST_SUITE("closed_forms") {

TEST_CASE("disc kernel formulas") {
  CHECK(std::abs(disc_kernel_closed(2.0, 0.6, 0.3) - 1.0 / (pi * 0.82 * 0.82)) < 1e-14);
  for (double p : {0.5, 1.0, 3.0}) CHECK(std::abs(disc_kernel_closed(p, 0.0, 0.0) - 1.0 / pi) < 1e-15);
  CHECK(disc_diag_closed(4.0, 0.5) == doctest::Approx(0.56588).epsilon(1e-5));
  CHECK(std::abs(disc_kernel_closed(3.0, 0.5, 0.5) - disc_diag_closed(3.0, 0.5)) < 1e-13);
  CHECK_THROWS_AS(disc_kernel_closed(2.0, 1.0, 0.0), Error);
}

TEST_CASE("punctured disc asymptotics and bounds") {
  CHECK(punctured_asym(1.0, 0.05) == doctest::Approx(1 / (2 * pi * 0.05) + 3 / (2 * pi) * 0.05).epsilon(1e-14));
  CHECK(punctured_asym(1.0, 0.05) == doctest::Approx(3.2070).epsilon(1e-4));
  CHECK(k_cut(2.0 / 3.0) == 2);
  const double r = 1e-4;
  CHECK(punctured_asym(2.0 / 3.0, r) * std::pow(r, 4.0 / 3.0) == doctest::Approx(1 / (3 * pi)).epsilon(1e-6));
  const PunctureBounds b = punctured_bounds(1.0, 0.1);
  REQUIRE(b.lower.has_value());
  // The bound and the two-term expansion differ by the next term, 5/(2 pi) r^3.
  CHECK(std::abs(*b.lower - punctured_asym(1.0, 0.1)) <= 1.1 * 5 / (2 * pi) * 1e-3);
  CHECK(*b.lower <= b.upper);
  CHECK(b.rho == doctest::Approx(std::sqrt(0.1)));
  CHECK_FALSE(punctured_bounds(1.5, 0.4).lower.has_value());
  CHECK_THROWS_AS(punctured_asym(2.0, 0.1), Error);
  CHECK_THROWS_AS(punctured_asym(1.0, 0.0), Error);
  CHECK_THROWS_AS(punctured_bounds(1.0, 0.1, 0.05), Error);
}

TEST_CASE("solver values sit in the bound corridor and fit the expansion") {
  const auto radii = log_radii(8);
  for (double p : {2.0 / 3.0, 1.0, 1.5}) {
    const auto K = punctured_samples(p, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const PunctureBounds b = punctured_bounds(p, radii[i]);
      if (b.lower) CHECK(K[i] >= *b.lower * (1 - 1e-3));
      CHECK(K[i] <= b.upper * (1 + 1e-3));
    }
    const AsymptoticFit f = fit_puncture(p, radii, K);
    const double a = p * k_cut(p);
    CHECK(std::abs(f.A / ((2 - a) / (2 * pi)) - 1) < 1e-2);
    CHECK(std::abs(f.B / ((4 - a) / (2 * pi)) - 1) < 5e-2);
  }
  CHECK_THROWS_AS(fit_puncture(1.0, {0.01, 0.02, 0.03}, {1, 2, 3}), Error);
  CHECK_THROWS_AS(fit_puncture(1.0, {0.01, 0.02, 0.03, 0.5}, {1, 2, 3, 4}), Error);
}

TEST_CASE("the fit recovers a synthetic two-term model") {
  const auto radii = log_radii(6);
  std::vector<double> v;
  for (double r : radii) v.push_back(0.3 / r + 0.7 * r);
  const AsymptoticFit f = fit_puncture(1.0, radii, v);
  CHECK(f.A == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(f.B == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("weighted disc formula") {
  CHECK(std::abs(weighted_disc_closed(1.0, 0.0, 0.0) - 1.0 / (2 * pi)) < 1e-15);
  CHECK(std::abs(weighted_disc_closed(1.0, 0.5, 0.5) - 0.35368) < 1e-5);
  for (double p : {1.0, 1.5, 2.0 / 3.0}) {
    const double a = p * k_cut(p);
    const double rz = 0.95 * (2 - a) / a;
    if (rz >= 1) continue;
    for (int j = 0; j < 16; ++j) {
      const cplx z = std::polar(std::min(rz, 0.95), 0.3);
      const cplx w = std::polar(0.97, 2 * pi * j / 16);
      CHECK(std::abs(weighted_disc_closed(p, w, z)) > 0.0);
    }
  }
}

TEST_CASE("boundary-distance corridor") {
  const Corridor c = lemma_b6_bounds(1.0, Domain::unit_disc(), 0.0);
  CHECK(c.lower == doctest::Approx(1 / (4 * pi)));
  CHECK(c.upper == doctest::Approx(1 / pi));
  CHECK(c.lower <= 1 / pi);
  const Domain A = Domain::annulus(0.5);
  const Corridor ca = lemma_b6_bounds(1.5, A, 0.75);
  const double K = KernelLab(A, 1.5).kernel_diag(0.75).value;
  CHECK(ca.lower <= K);
  CHECK(K <= ca.upper);
  const double d1 = lemma_b6_bounds(1.5, Domain::unit_disc(), 0.99).lower;
  const double d2 = lemma_b6_bounds(1.5, Domain::unit_disc(), 0.999).lower;
  CHECK(d2 / d1 == doctest::Approx(std::pow(10.0, 1.5)).epsilon(1e-9));
}

TEST_CASE("mean-value characterization") {
  const MeanValueReport d0 = mean_value_check(Domain::unit_disc(), 1.5, 0.0);
  CHECK(std::abs(d0.kernel_times_area - 1) < 1e-6);
  CHECK(d0.max_residual <= 1e-10);
  for (double p : {1.0, 2.0, 3.0}) {
    const MeanValueReport d = mean_value_check(Domain::unit_disc(), p, 0.3);
    CHECK(d.kernel_times_area > 1 + 1e-3);
    CHECK(d.kernel_times_area == doctest::Approx(1 / (0.91 * 0.91)).epsilon(1e-6));
    CHECK(d.max_residual > 0.1);
  }
  for (cplx a : {cplx(0.75, 0.0), cplx(0.0, -0.6), cplx(-0.9, 0.0)})
    CHECK(mean_value_check(Domain::annulus(0.5), 2.0, a).kernel_times_area > 1 + 1e-3);
}

TEST_CASE("Hardy means, Carleman and the embedding ratio") {
  Eigen::VectorXcd one = Eigen::VectorXcd::Ones(1);
  const Carleman c1 = carleman_check(one);
  CHECK(std::abs(c1.lhs - pi) < 1e-10);
  CHECK(std::abs(c1.rhs - pi) < 1e-10);

  for (int k : {1, 3, 6}) {
    Eigen::VectorXcd zk = Eigen::VectorXcd::Zero(k + 1);
    zk[k] = 1.0;
    for (double p : {1.0, 2.0}) {
      CHECK(hardy_means(p, zk).norm_pow == doctest::Approx(2 * pi).epsilon(1e-12));
      const double expect = std::pow(pi / (p * k + 1), 1 / (2 * p)) / std::pow(2 * pi, 1 / p);
      CHECK(hl_ratio(p, zk) == doctest::Approx(expect).epsilon(1e-8));
    }
  }

  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXcd f(1 + t % 10);
    for (auto& x : f) x = cplx(g(rng), g(rng));
    const Carleman c = carleman_check(f);
    CHECK(c.lhs == doctest::Approx(area_l2(f)).epsilon(1e-10));
    CHECK(c.lhs <= c.rhs * (1 + 1e-12));
    const HardyMeans h = hardy_means(1.5, f);
    for (std::size_t i = 1; i < h.means.size(); ++i) CHECK(h.means[i] >= h.means[i - 1] * (1 - 1e-12));
  }
}

TEST_CASE("Szego kernel of the circle") {
  CHECK(szego_diag(0.0) == doctest::Approx(1 / (2 * pi)).epsilon(1e-12));
  for (double r : {0.3, 0.6}) CHECK(szego_diag(r) == doctest::Approx(1 / (2 * pi * (1 - r * r))).epsilon(1e-10));
}

TEST_CASE("minimum of the punctured-disc profile") {
  LabConfig c;
  c.N = 16;
  const RpExploration e = rp_exploration(1.0, c, 1e-4);
  CHECK(e.r_p > 0.0);
  CHECK(e.r_p < 1.0);
  CHECK(e.values.front() > e.phi);
  CHECK(e.values.back() > e.phi);
  for (double v : e.values) CHECK(v >= e.phi * (1 - 1e-9));
  // log K is convex in log r.
  for (std::size_t i = 1; i + 1 < e.radii.size(); ++i) {
    const double h1 = std::log(e.radii[i] / e.radii[i - 1]);
    const double h2 = std::log(e.radii[i + 1] / e.radii[i]);
    const double s1 = (std::log(e.values[i]) - std::log(e.values[i - 1])) / h1;
    const double s2 = (std::log(e.values[i + 1]) - std::log(e.values[i])) / h2;
    CHECK(s2 >= s1 - 1e-8);
  }
  c.n_r = 48;
  c.n_theta = 96;
  CHECK(std::abs(rp_exploration(1.0, c, 1e-4).r_p - e.r_p) < 1e-2);
}

}
