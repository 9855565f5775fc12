#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pberg/domain.hpp"
#include "pberg/error.hpp"

using namespace pberg;
using std::numbers::pi;

namespace {

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_SUITE("domain_quad") {

TEST_CASE("build_grid area examples") {
  CHECK(build_grid(Domain::unit_disc(), 32, 64).total_weight() == doctest::Approx(pi).epsilon(1e-12));
  CHECK(std::abs(build_grid(Domain::annulus(0.5), 32, 64).total_weight() - 0.75 * pi) < 1e-10);
  CHECK(std::abs(build_grid(Domain::disc(2.0), 16, 32).total_weight() - 4.0 * pi) < 1e-10);

  const auto g = build_grid(Domain::unit_disc(), 32, 64);
  double m2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m2 += g.weights[i] * std::norm(g.nodes[i]);
  CHECK(std::abs(m2 - pi / 2) < 1e-10);
}

TEST_CASE("punctured disc grid avoids the origin and keeps the disc area") {
  for (int q : {1, 2, 3, 5}) {
    const auto g = build_grid(Domain::punctured_disc(), 16, 32, {.breaks = {}, .grading = q});
    CHECK(std::abs(g.total_weight() - pi) < 1e-12);
    for (auto z : g.nodes) REQUIRE(std::abs(z) > 0.0);
  }
}

TEST_CASE("grid invariants: positive weights, interior nodes") {
  for (const auto& d : {Domain::unit_disc(), Domain::disc(0.5), Domain::annulus(0.3),
                        Domain::punctured_disc()}) {
    const auto g = build_grid(d, 8, 16);
    for (std::size_t i = 0; i < g.size(); ++i) {
      REQUIRE(g.weights[i] > 0.0);
      REQUIRE(d.contains(g.nodes[i]));
    }
  }
}

TEST_CASE("invalid rule sizes are parameter errors") {
  auto code = [](auto f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Undefined;
  };
  CHECK(code([] { build_grid(Domain::unit_disc(), 3, 64); }) == ErrorCode::Parameter);
  CHECK(code([] { build_grid(Domain::unit_disc(), 8, 7); }) == ErrorCode::Parameter);
  CHECK(code([] { Domain::annulus(1.0); }) == ErrorCode::Parameter);
  CHECK(code([] { Domain::disc(-1.0); }) == ErrorCode::Parameter);
}

TEST_CASE("boundary_grid examples") {
  const auto b = boundary_grid(Domain::unit_disc(), 128);
  CHECK(std::abs(sum(b.boundary_weights) - 2 * pi) < 1e-12);
  double re = 0.0;
  for (std::size_t i = 0; i < b.boundary_nodes.size(); ++i)
    re += b.boundary_weights[i] * b.boundary_nodes[i].real();
  CHECK(std::abs(re) < 1e-12);
  CHECK(std::abs(sum(boundary_grid(Domain::disc(2.0), 64).boundary_weights) - 4 * pi) < 1e-12);
  CHECK_THROWS_AS(boundary_grid(Domain::annulus(0.5), 64), Error);
  CHECK_THROWS_AS(boundary_grid(Domain::punctured_disc(), 64), Error);
  CHECK_THROWS_AS(boundary_grid(Domain::unit_disc(), 8), Error);
}

TEST_CASE("mask examples") {
  const auto g = build_grid(Domain::unit_disc(), 32, 64);
  const auto inner = Region::sub_disc(0.5);
  CHECK(std::abs(mask(g, *inner).total_weight() - pi / 4) < 2e-3);
  CHECK(std::abs(mask(g, *Region::complement(inner)).total_weight() - 3 * pi / 4) < 2e-3);
  try {
    mask(g, *Region::annular_band(0.5, 0.5));
    FAIL("expected empty-region error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRegion);
  }
}

TEST_CASE("breakpoint-aligned grid makes sub-disc masks exact") {
  const auto g = build_grid(Domain::unit_disc(), 16, 32, {.breaks = {0.5}});
  CHECK(std::abs(mask(g, *Region::sub_disc(0.5)).total_weight() - pi / 4) < 1e-13);
}

TEST_CASE("mask partition is exact") {
  const auto g = build_grid(Domain::annulus(0.2), 12, 24);
  const std::vector<RegionPtr> regions{
      Region::sub_disc(0.6), Region::annular_band(0.3, 0.7),
      Region::indicator([](cplx z) { return z.real() > 0.1; }),
      Region::union_of(Region::sub_disc(0.4), Region::annular_band(0.8, 0.9))};
  for (const auto& e : regions) {
    const auto in = masked_weights(g, *e);
    const auto out = masked_weights(g, *Region::complement(e));
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(in[i] + out[i] == g.weights[i]);
  }
}

TEST_CASE("polynomial exactness of the tensor rule") {
  const int n_r = 8;
  const auto g = build_grid(Domain::unit_disc(), n_r, 32);
  for (int a = 0; a <= n_r - 1; ++a) {
    for (int b = 0; b <= n_r - 1; ++b) {
      cplx s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i)
        s += g.weights[i] * std::pow(g.nodes[i], a) * std::pow(std::conj(g.nodes[i]), b);
      const double expect = a == b ? pi / (a + 1) : 0.0;
      REQUIRE(std::abs(s - expect) < 1e-12);
    }
  }
}

TEST_CASE("refinement does not increase the area error") {
  for (const auto& d : {Domain::unit_disc(), Domain::annulus(0.5), Domain::disc(1.5)}) {
    double prev = INFINITY;
    for (int n_r : {8, 16, 32}) {
      const double err = std::abs(build_grid(d, n_r, 32).total_weight() - d.area());
      CHECK(err <= prev + 1e-13 * d.area());
      CHECK(err < 1e-12 * d.area());
      prev = err;
    }
  }
}

TEST_CASE("Gauss-Legendre integrates degree 2n-1 exactly") {
  std::vector<double> x, w;
  for (int n : {1, 2, 5, 16, 40}) {
    gauss_legendre(n, x, w);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += w[i] * std::pow(x[i], deg);
      const double expect = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      REQUIRE(std::abs(s - expect) < 1e-13);
    }
  }
}

TEST_CASE("domain geometry queries") {
  const auto a = Domain::annulus(0.5);
  CHECK(a.boundary_distance(0.7) == doctest::Approx(0.2));
  CHECK_FALSE(a.contains(0.3));
  const auto p = Domain::punctured_disc();
  CHECK(p.area() == doctest::Approx(pi));
  CHECK_FALSE(p.contains(0.0));
  CHECK(p.boundary_distance(0.1) == doctest::Approx(0.1));
  CHECK(Domain::disc(2.0).diameter() == 4.0);
}

}
