#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "difflab/errors.hpp"
#include "difflab/grid.hpp"

namespace difflab {

//! Points are padded to three coordinates; the domain's dimension says how
//! many are meaningful.
using Point = std::array<double, 3>;

struct Ball {
  Point center{0, 0, 0};
  double radius = 1.0;
};

//! Axis-aligned ellipse (2D) or ellipsoid (3D): semi_axes per coordinate.
struct Ellipse {
  Point center{0, 0, 0};
  Point semi_axes{1, 1, 1};
};

//! Segment from p0 to p1 inflated by radius. Boundary is C^1 but the
//! curvature jumps where the caps meet the straight sides.
struct Capsule {
  Point p0{0, 0, 0}, p1{0, 0, 0};
  double radius = 1.0;
};

using Primitive = std::variant<Ball, Ellipse, Capsule>;

enum class DomainKind {
  interior,  // Omega = inside the single primitive
  exterior,  // Omega = complement of the union of primitive closures
  annulus,   // Omega = between two concentric balls [inner, outer]
};

struct BBox {
  Point lo{0, 0, 0}, hi{0, 0, 0};
  bool valid() const;
};

struct DomainSpec {
  DomainKind kind = DomainKind::exterior;
  int dimension = 2;
  std::vector<Primitive> primitives;
  BBox bbox;  // used by grid-based operations; optional otherwise
};

//! Structural checks: dimension in {1,2,3}, primitive counts per kind,
//! pairwise disjoint closures for exterior domains, concentric ordered balls
//! for annuli. Throws ConfigError with the offending primitive index.
void validate(const DomainSpec& spec);

//! Signed distance to the primitive's boundary, positive outside it.
double primitive_signed_distance(const Primitive& prim, const Point& x,
                                 int dim);

//! Signed distance to the domain boundary, positive inside Omega. This is the
//! exact d* entering every comparison the library makes.
double exact_signed_distance(const DomainSpec& spec, const Point& x);

bool contains(const DomainSpec& spec, const Point& x);

//! Value function of the quadratic-cost control problem with target the
//! complement of Omega: dist(x, complement)^2 / (4t). Throws DomainError for
//! t <= 0.
double hopf_lax_value(const DomainSpec& spec, const Point& x, double t);

//! n parametrization-uniform samples of the boundary of primitive prim_idx.
std::vector<Point> boundary_points(const DomainSpec& spec,
                                   std::size_t prim_idx, int n);

//! Unit normal at boundary point p of primitive prim_idx, pointing into
//! Omega.
Point inward_normal(const DomainSpec& spec, std::size_t prim_idx,
                    const Point& p);

//! Points at exact distance R inside Omega, offset along inward normals from
//! n parametrization-uniform boundary samples per primitive. Every returned
//! point is re-validated against exact_signed_distance to 1e-10; failures
//! (focal distance reached, or another boundary component closer) raise
//! CausticError.
std::vector<Point> parallel_surface(const DomainSpec& spec, double R, int n);

//! Principal curvatures at boundary point p, with respect to the unit normal
//! pointing into Omega. A sphere bounding a ball domain gives +1/radius; the
//! same sphere as an exterior obstacle gives -1/radius.
std::vector<double> principal_curvatures(const DomainSpec& spec,
                                         const Point& p);

//! prod_j (1/R - kappa_j) over the N-1 principal curvatures at p, which must
//! lie on the boundary (|d*| <= 1e-8). Requires kappa_j < 1/R for all j.
double curvature_product(const DomainSpec& spec, const Point& p, double R);

//! First crossing of the domain boundary along p + s * dir, s in (0, smax],
//! for an axis direction. Requires a sign change of the membership indicator
//! across the segment; returns the crossing distance.
std::optional<double> boundary_intercept(const DomainSpec& spec,
                                         const Point& p, const Point& dir,
                                         double smax);

//! Smallest geometric length scale of the domain: curvature radii of the
//! primitives, gaps between components, annulus width. Grid-based operations
//! refuse spacings that do not resolve it.
double min_feature_size(const DomainSpec& spec);

//! First-order upwind marching of |d| outward from an exactly seeded band
//! around the boundary, signed by membership. Grid must resolve every
//! primitive: min feature size >= 8h, else ResolutionError.
ScalarField fast_march_distance(const DomainSpec& spec,
                                const CartesianGrid2D& grid);

//! exact_signed_distance sampled on a grid (mask from membership).
ScalarField sample_signed_distance(const DomainSpec& spec,
                                   std::shared_ptr<const Grid> grid);

}  // namespace difflab
