#include "pberg/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pberg/error.hpp"

namespace pberg {

namespace {
constexpr double kPi = std::numbers::pi;
}

Domain Domain::unit_disc() { return Domain(DomainKind::UnitDisc, 0.0, 1.0); }

Domain Domain::disc(double radius) {
  require(radius > 0.0 && std::isfinite(radius), ErrorCode::Parameter,
          "disc radius must be positive");
  return Domain(DomainKind::Disc, 0.0, radius);
}

Domain Domain::annulus(double inner_radius) {
  require(inner_radius > 0.0 && inner_radius < 1.0, ErrorCode::Parameter,
          "annulus inner radius must lie in (0, 1)");
  return Domain(DomainKind::Annulus, inner_radius, 1.0);
}

Domain Domain::punctured_disc() {
  return Domain(DomainKind::PuncturedDisc, 0.0, 1.0);
}

double Domain::area() const noexcept {
  return kPi * (outer_ * outer_ - inner_ * inner_);
}

double Domain::boundary_distance(cplx z) const noexcept {
  const double r = std::abs(z);
  double d = outer_ - r;
  if (kind_ == DomainKind::Annulus) d = std::min(d, r - inner_);
  if (kind_ == DomainKind::PuncturedDisc) d = std::min(d, r);
  return d;
}

bool Domain::contains(cplx z) const noexcept {
  return boundary_distance(z) > 0.0;
}

std::string Domain::name() const {
  std::ostringstream os;
  switch (kind_) {
    case DomainKind::UnitDisc: os << "disc"; break;
    case DomainKind::Disc: os << "disc(R=" << outer_ << ")"; break;
    case DomainKind::Annulus: os << "annulus(r_in=" << inner_ << ")"; break;
    case DomainKind::PuncturedDisc: os << "punctured"; break;
  }
  return os.str();
}

double QuadGrid::total_weight() const noexcept {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  require(n >= 1, ErrorCode::Parameter, "Gauss-Legendre order must be >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess.
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = t; p0 = 1.0; }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  if (n == 1) { x[0] = 0.0; w[0] = 2.0; }
}

QuadGrid build_grid(const Domain& domain, int n_r, int n_theta,
                    const GridOptions& options) {
  require(n_r >= 4, ErrorCode::Parameter, "n_r must be >= 4");
  require(n_theta >= 8, ErrorCode::Parameter, "n_theta must be >= 8");
  require(options.grading >= 1 && options.grading <= 8, ErrorCode::Parameter,
          "radial grading exponent must lie in [1, 8]");

  const double r_lo = domain.inner_radius();
  const double r_hi = domain.outer_radius();
  std::vector<double> edges{r_lo, r_hi};
  for (double b : options.breaks) {
    if (b > r_lo + 1e-12 && b < r_hi - 1e-12) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              edges.end());

  std::vector<double> gx, gw;
  gauss_legendre(n_r, gx, gw);

  std::vector<double> radii, radial_w;
  for (std::size_t panel = 0; panel + 1 < edges.size(); ++panel) {
    const double a = edges[panel];
    const double b = edges[panel + 1];
    const bool graded = (a == 0.0 && options.grading > 1);
    for (int i = 0; i < n_r; ++i) {
      const double s = 0.5 * (gx[i] + 1.0);  // in (0, 1)
      const double ws = 0.5 * gw[i];
      double r, dr;
      if (graded) {
        const int q = options.grading;
        r = b * std::pow(s, q);
        dr = b * q * std::pow(s, q - 1) * ws;
      } else {
        r = a + (b - a) * s;
        dr = (b - a) * ws;
      }
      radii.push_back(r);
      radial_w.push_back(r * dr);  // area Jacobian
    }
  }

  QuadGrid grid;
  grid.n_r = n_r;
  grid.n_theta = n_theta;
  const double dtheta = 2.0 * kPi / n_theta;
  grid.nodes.reserve(radii.size() * n_theta);
  grid.weights.reserve(radii.size() * n_theta);
  for (std::size_t ring = 0; ring < radii.size(); ++ring) {
    for (int j = 0; j < n_theta; ++j) {
      grid.nodes.push_back(std::polar(radii[ring], j * dtheta));
      grid.weights.push_back(radial_w[ring] * dtheta);
    }
  }
  grid.layout = PolarLayout{radii, n_theta, 0.0};
  return grid;
}

QuadGrid boundary_grid(const Domain& domain, int m) {
  require(m >= 16, ErrorCode::Parameter, "boundary node count must be >= 16");
  require(domain.kind() == DomainKind::UnitDisc || domain.kind() == DomainKind::Disc,
          ErrorCode::UnsupportedDomain,
          "boundary quadrature is only available for discs, got " + domain.name());
  QuadGrid grid;
  const double R = domain.outer_radius();
  grid.boundary_nodes.reserve(m);
  for (int j = 0; j < m; ++j) {
    grid.boundary_nodes.push_back(std::polar(R, 2.0 * kPi * j / m));
    grid.boundary_weights.push_back(2.0 * kPi * R / m);
  }
  return grid;
}

// --- regions ---------------------------------------------------------------

RegionPtr Region::sub_disc(double r) {
  require(r > 0.0, ErrorCode::Parameter, "sub-disc radius must be positive");
  return std::make_shared<Region>(SubDisc{r});
}

RegionPtr Region::annular_band(double a, double b) {
  require(a >= 0.0 && b >= a, ErrorCode::Parameter, "annular band needs 0 <= a <= b");
  return std::make_shared<Region>(AnnularBand{a, b});
}

RegionPtr Region::complement(RegionPtr other) {
  return std::make_shared<Region>(Complement{std::move(other)});
}

RegionPtr Region::union_of(RegionPtr a, RegionPtr b) {
  return std::make_shared<Region>(Union{std::move(a), std::move(b)});
}

RegionPtr Region::indicator(std::function<bool(cplx)> predicate) {
  return std::make_shared<Region>(Indicator{std::move(predicate)});
}

namespace {
template <class... Fs>
struct overloaded : Fs... { using Fs::operator()...; };
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;
}  // namespace

bool Region::contains(cplx z) const {
  return std::visit(
      overloaded{
          [&](const SubDisc& s) { return std::abs(z) < s.r; },
          [&](const AnnularBand& s) {
            const double r = std::abs(z);
            return r > s.a && r < s.b;
          },
          [&](const Complement& s) { return !s.other->contains(z); },
          [&](const Union& s) { return s.first->contains(z) || s.second->contains(z); },
          [&](const Indicator& s) { return s.predicate(z); },
      },
      v_);
}

std::vector<double> Region::radial_breaks() const {
  return std::visit(
      overloaded{
          [](const SubDisc& s) { return std::vector<double>{s.r}; },
          [](const AnnularBand& s) { return std::vector<double>{s.a, s.b}; },
          [](const Complement& s) { return s.other->radial_breaks(); },
          [](const Union& s) {
            auto v = s.first->radial_breaks();
            auto w = s.second->radial_breaks();
            v.insert(v.end(), w.begin(), w.end());
            return v;
          },
          [](const Indicator&) { return std::vector<double>{}; },
      },
      v_);
}

std::optional<double> Region::exact_area(const Domain& domain) const {
  const double lo = domain.inner_radius();
  const double hi = domain.outer_radius();
  auto disc_area = [&](double r) {
    const double c = std::clamp(r, lo, hi);
    return kPi * (c * c - lo * lo);
  };
  return std::visit(
      overloaded{
          [&](const SubDisc& s) -> std::optional<double> { return disc_area(s.r); },
          [&](const AnnularBand& s) -> std::optional<double> {
            return disc_area(s.b) - disc_area(s.a);
          },
          [&](const Complement& s) -> std::optional<double> {
            auto a = s.other->exact_area(domain);
            if (!a) return std::nullopt;
            return domain.area() - *a;
          },
          [&](const Union&) -> std::optional<double> { return std::nullopt; },
          [&](const Indicator&) -> std::optional<double> { return std::nullopt; },
      },
      v_);
}

std::string Region::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const SubDisc& s) { os << "SubDisc(" << s.r << ")"; },
                 [&](const AnnularBand& s) { os << "AnnularBand(" << s.a << "," << s.b << ")"; },
                 [&](const Complement& s) { os << "Complement(" << s.other->describe() << ")"; },
                 [&](const Union& s) {
                   os << "Union(" << s.first->describe() << "," << s.second->describe() << ")";
                 },
                 [&](const Indicator&) { os << "Indicator"; },
             },
             v_);
  return os.str();
}

std::vector<char> membership(const QuadGrid& grid, const Region& region) {
  std::vector<char> in(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) in[i] = region.contains(grid.nodes[i]) ? 1 : 0;
  return in;
}

QuadGrid mask(const QuadGrid& grid, const Region& region) {
  const auto in = membership(grid, region);
  QuadGrid out;
  out.n_r = grid.n_r;
  out.n_theta = grid.n_theta;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!in[i]) continue;
    out.nodes.push_back(grid.nodes[i]);
    out.weights.push_back(grid.weights[i]);
  }
  require(!out.nodes.empty(), ErrorCode::EmptyRegion,
          "region " + region.describe() + " contains no grid nodes");
  return out;
}

std::vector<double> masked_weights(const QuadGrid& grid, const Region& region) {
  const auto in = membership(grid, region);
  std::vector<double> w(grid.size(), 0.0);
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (in[i]) {
      w[i] = grid.weights[i];
      any = true;
    }
  }
  require(any, ErrorCode::EmptyRegion,
          "region " + region.describe() + " contains no grid nodes");
  return w;
}

}  // namespace pberg
