#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pberg {

using cplx = std::complex<double>;

enum class DomainKind { UnitDisc, Disc, Annulus, PuncturedDisc };

/// Rotationally symmetric planar model domain centred at the origin.
class Domain {
public:
  static Domain unit_disc();
  static Domain disc(double radius);
  static Domain annulus(double inner_radius);
  static Domain punctured_disc();

  DomainKind kind() const noexcept { return kind_; }
  /// Outer radius (1 except for Disc(R)).
  double outer_radius() const noexcept { return outer_; }
  /// Inner radius (annulus only, else 0).
  double inner_radius() const noexcept { return inner_; }

  double area() const noexcept;
  double diameter() const noexcept { return 2.0 * outer_; }
  /// Distance from z to the boundary; the puncture counts as boundary.
  double boundary_distance(cplx z) const noexcept;
  bool contains(cplx z) const noexcept;
  /// True when the origin is removed (annulus and punctured disc).
  bool has_hole() const noexcept {
    return kind_ == DomainKind::Annulus || kind_ == DomainKind::PuncturedDisc;
  }
  std::string name() const;

private:
  Domain(DomainKind kind, double inner, double outer)
    : kind_(kind), inner_(inner), outer_(outer) {}

  DomainKind kind_;
  double inner_;
  double outer_;
};

/// Tensor layout of a polar grid: node index = ring * n_theta + j, with
/// angle theta0 + 2*pi*j/n_theta on ring `ring`.
struct PolarLayout {
  std::vector<double> radii;
  int n_theta = 0;
  double theta0 = 0.0;

  int n_rings() const noexcept { return static_cast<int>(radii.size()); }
  int n_nodes() const noexcept { return n_rings() * n_theta; }
};

struct QuadGrid {
  std::vector<cplx> nodes;
  std::vector<double> weights;
  std::vector<cplx> boundary_nodes;
  std::vector<double> boundary_weights;
  int n_r = 0;
  int n_theta = 0;
  /// Present while every node of every ring is kept (unmasked grids).
  std::optional<PolarLayout> layout;

  std::size_t size() const noexcept { return nodes.size(); }
  double total_weight() const noexcept;
};

struct GridOptions {
  /// Extra radial panel boundaries; region masks aligned with these are exact.
  std::vector<double> breaks;
  /// Radial grading exponent q >= 1 on a panel starting at r = 0: r = b s^q.
  int grading = 1;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

QuadGrid build_grid(const Domain& domain, int n_r, int n_theta,
                    const GridOptions& options = {});

/// m uniform nodes on the boundary circle, arc-length weights.
QuadGrid boundary_grid(const Domain& domain, int m);

// --- regions -------------------------------------------------------------

class Region;
using RegionPtr = std::shared_ptr<const Region>;

/// Measurable subset E of a domain, decided pointwise.
class Region {
public:
  struct SubDisc { double r; };
  struct AnnularBand { double a, b; };
  struct Complement { RegionPtr other; };
  struct Union { RegionPtr first, second; };
  struct Indicator { std::function<bool(cplx)> predicate; };
  using Variant = std::variant<SubDisc, AnnularBand, Complement, Union, Indicator>;

  explicit Region(Variant v) : v_(std::move(v)) {}

  static RegionPtr sub_disc(double r);
  static RegionPtr annular_band(double a, double b);
  static RegionPtr complement(RegionPtr other);
  static RegionPtr union_of(RegionPtr a, RegionPtr b);
  static RegionPtr indicator(std::function<bool(cplx)> predicate);

  bool contains(cplx z) const;
  /// Radii of circles bounding the region (for exact grid alignment).
  std::vector<double> radial_breaks() const;
  /// Area when it has a closed form inside `domain`, else nullopt.
  std::optional<double> exact_area(const Domain& domain) const;
  std::string describe() const;
  const Variant& variant() const noexcept { return v_; }

private:
  Variant v_;
};

/// 0/1 membership per grid node.
std::vector<char> membership(const QuadGrid& grid, const Region& region);

/// Restricts grid to the nodes inside region. Weights are unchanged.
QuadGrid mask(const QuadGrid& grid, const Region& region);

/// Full-length weight vector with zeros outside region (keeps tensor layout).
std::vector<double> masked_weights(const QuadGrid& grid, const Region& region);

}  // namespace pberg
