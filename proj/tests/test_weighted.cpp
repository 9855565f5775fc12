#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pberg/weighted_bergman.hpp"

using namespace pberg;
using std::numbers::pi;

namespace {

cplx disc_bergman(cplx zeta, cplx z) {
  const cplx t = 1.0 - zeta * std::conj(z);
  return 1.0 / (pi * t * t);
}

// Weighted disc kernel for phi = a log|w|, summed from the orthonormal
// monomials: ||w^k||^2 = 2 pi / (2k + 2 - a).
cplx weighted_series(double a, cplx w, cplx z, int terms = 400) {
  cplx s = 0.0, t = 1.0;
  const cplx x = w * std::conj(z);
  for (int k = 0; k < terms; ++k) {
    s += t * (2.0 * k + 2.0 - a) / (2.0 * pi);
    t *= x;
  }
  return s;
}

std::vector<std::pair<cplx, cplx>> sample_pairs(int n, double radius, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<cplx, cplx>> out;
  for (int i = 0; i < n; ++i) {
    const cplx a = std::polar(radius * std::sqrt(u(rng)), 2 * pi * u(rng));
    const cplx b = std::polar(radius * std::sqrt(u(rng)), 2 * pi * u(rng));
    out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

TEST_SUITE("weighted_bergman") {

TEST_CASE("unweighted disc kernel") {
  const QuadGrid g = build_grid(Domain::unit_disc(), 32, 64);
  const WeightedKernel K = weighted_kernel(Basis::monomial(24), g, [](cplx) { return 0.0; });
  for (auto [a, b] : sample_pairs(10, 0.5, 1)) CHECK(std::abs(K(a, b) - disc_bergman(a, b)) < 1e-8);
  CHECK(K.diag(0.0) == doctest::Approx(1.0 / pi).epsilon(1e-12));
}

TEST_CASE("disc kernel with a logarithmic weight at the origin") {
  for (double p : {1.0, 1.5}) {
    const WeightedKernel K = weighted_disc_kernel(p, 24, 32, 64);
    const double a = p * k_cut(p);
    for (auto [w, z] : sample_pairs(10, 0.55, 2))
      CHECK(std::abs(K(w, z) - weighted_series(a, w, z)) < 1e-8);
  }
  const WeightedKernel K1 = weighted_disc_kernel(1.0, 24, 32, 64);
  CHECK(K1(0.0, 0.0).real() == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-10));
  CHECK(std::abs(K1(0.5, 0.5) - 1.25 / (2 * pi * 0.5625)) < 1e-8);
}

TEST_CASE("invalid densities are rejected") {
  const QuadGrid g = build_grid(Domain::unit_disc(), 8, 16);
  std::vector<double> d(g.size(), 1.0);
  d[3] = INFINITY;
  CHECK_THROWS_AS(WeightedKernel(Basis::monomial(4), g, d), Error);
  d[3] = 0.0;
  for (auto& x : d) x = 0.0;
  try {
    WeightedKernel(Basis::monomial(4), g, d);
    FAIL("expected an ill-conditioned Gram");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IllConditioned);
  }
}

TEST_CASE("reproducing, Hermitian and diagonal maximal") {
  const Domain d = Domain::annulus(0.5);
  const QuadGrid g = build_grid(d, 24, 64);
  const WeightedKernel K =
      weighted_kernel(make_basis(d, 2.0, 12), g, [](cplx z) { return std::real(z) + std::norm(z); });
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n;
  for (int t = 0; t < 5; ++t) {
    Eigen::VectorXcd raw(K.basis().size());
    for (auto& c : raw) c = cplx(n(rng), n(rng));
    for (cplx z : {cplx(0.7, 0.1), cplx(-0.2, -0.6)})
      CHECK(std::abs(K.reproducing_residual(raw, z)) < 1e-8 * raw.norm());
  }
  const auto pairs = std::vector<std::pair<cplx, cplx>>{
      {cplx(0.7, 0.1), cplx(-0.2, -0.6)}, {cplx(0.0, 0.9), cplx(0.55, 0.0)}, {cplx(-0.8, 0.1), cplx(0.6, 0.6)}};
  for (auto [a, b] : pairs) {
    CHECK(std::abs(K(a, b) - std::conj(K(b, a))) < 1e-10 * std::abs(K(a, b)));
    CHECK(K.diag(b) >= std::norm(K(a, b)) / K.diag(a) * (1 - 1e-8));
  }
}

TEST_CASE("p-Bergman kernel is the L^2 kernel for the weight |m_p|^{p-2}") {
  CHECK(thm2_residual(Domain::unit_disc(), 2.0, 0.4).same_space_residual <= 1e-9);
  CHECK(thm2_residual(Domain::annulus(0.5), 2.0, 0.7).same_space_residual <= 1e-9);
  LabConfig c;
  double prev = INFINITY;
  int violations = 0;
  for (int N : {12, 18, 24}) {
    c.N = N;
    const Thm2Report r = thm2_residual(Domain::unit_disc(), 1.5, 0.4, c);
    if (r.residual > prev) ++violations;
    prev = r.residual;
    CHECK(r.same_space_residual < 1e-8);
  }
  CHECK(violations <= 1);
  CHECK(prev <= 1e-2);
  CHECK_THROWS_AS(thm2_residual(Domain::unit_disc(), 2.5, 0.4), Error);
}

TEST_CASE("NS metric coefficient") {
  const NsMetric disc(Domain::unit_disc(), 2.0);
  const double c0 = disc.coefficient(0.3).coefficient.value;
  CHECK(c0 > 0.0);
  CHECK(std::abs(disc.coefficient(cplx(0.0, 0.3)).coefficient.value - c0) < 1e-6);
  CHECK(disc.coefficient(0.0).coefficient.value > 0.0);
}

TEST_CASE("NS metric stays bounded at the puncture") {
  const NsMetric ns(Domain::punctured_disc(), 1.0);
  std::vector<double> c, logK;
  for (double r : {0.1, 0.03, 0.01}) {
    const NsMetricReport rep = ns.coefficient(r);
    c.push_back(rep.coefficient.value);
    logK.push_back(std::log(rep.Kp));
  }
  const double hi = *std::max_element(c.begin(), c.end());
  const double lo = *std::min_element(c.begin(), c.end());
  CHECK(lo > 0.0);
  CHECK(hi <= 2 * lo);
  CHECK(logK.back() - logK.front() > 2.0);
  const PoleFit f = ns.fit_pole({0.005, 0.01, 0.02, 0.04, 0.08});
  CHECK(f.a[0] > 0.0);
  CHECK(f.max_relative_residual < 1e-4);
}

}
