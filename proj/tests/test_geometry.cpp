#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "difflab/errors.hpp"
#include "difflab/geometry.hpp"
#include "difflab/grid.hpp"
#include "oracles.hpp"

using namespace difflab;

namespace {

DomainSpec ball_domain(DomainKind kind, double r, Point c = {0, 0, 0},
                       int dim = 2) {
  DomainSpec spec;
  spec.kind = kind;
  spec.dimension = dim;
  spec.primitives.push_back(Ball{c, r});
  return spec;
}

DomainSpec two_ball_exterior(double cx, double r) {
  DomainSpec spec;
  spec.kind = DomainKind::exterior;
  spec.dimension = 2;
  spec.primitives.push_back(Ball{{-cx, 0.0, 0.0}, r});
  spec.primitives.push_back(Ball{{cx, 0.0, 0.0}, r});
  return spec;
}

DomainSpec ellipse_domain(DomainKind kind, double a, double b) {
  DomainSpec spec;
  spec.kind = kind;
  spec.dimension = 2;
  spec.primitives.push_back(Ellipse{{0.0, 0.0, 0.0}, {a, b, 1.0}});
  return spec;
}

CartesianGrid2D box_grid(double lo, double hi, double h) {
  CartesianGrid2D g;
  g.origin = {lo, lo};
  g.h = h;
  g.nx = static_cast<int>(std::llround((hi - lo) / h)) + 1;
  g.ny = g.nx;
  return g;
}

double node_value(const ScalarField& f, double x, double y) {
  const CartesianGrid2D& g = f.grid->cartesian();
  const int ix = static_cast<int>(std::llround((x - g.origin[0]) / g.h));
  const int iy = static_cast<int>(std::llround((y - g.origin[1]) / g.h));
  REQUIRE(ix >= 0);
  REQUIRE(iy >= 0);
  REQUIRE(ix < g.nx);
  REQUIRE(iy < g.ny);
  return f.values[g.index(ix, iy)];
}

}  // namespace

TEST_CASE("signed distance on closed forms") {
  const DomainSpec ext = ball_domain(DomainKind::exterior, 1.0);
  CHECK(exact_signed_distance(ext, {2.0, 0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(exact_signed_distance(ext, {0.5, 0.0, 0.0}) == doctest::Approx(-0.5));

  const DomainSpec two = two_ball_exterior(3.0, 1.0);
  const double mid = exact_signed_distance(two, {0.0, 0.0, 0.0});
  CHECK(mid == doctest::Approx(2.0));
  const double brute =
      oracle::sampled_circle_distance({{-3.0, 0.0, 1.0}, {3.0, 0.0, 1.0}}, 0.0,
                                      0.0);
  CHECK(std::abs(mid - brute) <= 1e-6);
  const double off = exact_signed_distance(two, {0.7, 1.3, 0.0});
  const double brute_off = oracle::sampled_circle_distance(
      {{-3.0, 0.0, 1.0}, {3.0, 0.0, 1.0}}, 0.7, 1.3);
  CHECK(std::abs(off - brute_off) <= 1e-6);
}

TEST_CASE("marched distance against the exact one") {
  const DomainSpec ext = ball_domain(DomainKind::exterior, 1.0);
  const ScalarField d = fast_march_distance(ext, box_grid(-2.0, 2.0, 0.01));
  CHECK(std::abs(node_value(d, 1.5, 0.0) - 0.5) <= 0.02);
  CHECK(std::abs(node_value(d, 1.0, 0.0)) <= 1e-6);  // node on the boundary

  DomainSpec ring;
  ring.kind = DomainKind::annulus;
  ring.dimension = 2;
  ring.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 1.0});
  ring.primitives.push_back(Ball{{0.0, 0.0, 0.0}, 3.0});
  const ScalarField dr =
      fast_march_distance(ring, box_grid(-3.5, 3.5, 0.01));
  CHECK(std::abs(node_value(dr, 1.5, 0.0) - 0.5) <= 0.02);
  CHECK(std::abs(node_value(dr, 0.6, 1.8) -
                 (std::hypot(0.6, 1.8) - 1.0)) <= 0.02);
}

TEST_CASE("quadratic-cost value on closed-form domains") {
  const DomainSpec ext = ball_domain(DomainKind::exterior, 1.0);
  CHECK(hopf_lax_value(ext, {2.0, 0.0, 0.0}, 0.25) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hopf_lax_value(ext, {0.5, 0.0, 0.0}, 0.7) == 0.0);

  const DomainSpec two = two_ball_exterior(3.0, 1.0);
  const Point x{0.0, 1.2, 0.0};
  const double t = 0.3;
  const double brute =
      oracle::sampled_circle_distance({{-3.0, 0.0, 1.0}, {3.0, 0.0, 1.0}}, 0.0,
                                      1.2);
  CHECK(hopf_lax_value(two, x, t) ==
        doctest::Approx(brute * brute / (4.0 * t)).epsilon(1e-6));
}

TEST_CASE("offset surfaces sit at the requested distance") {
  const auto circle_pts =
      parallel_surface(ball_domain(DomainKind::exterior, 1.0), 0.5, 32);
  CHECK(circle_pts.size() == 32);
  for (const Point& p : circle_pts)
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(1.5).epsilon(1e-10));

  const auto inner_pts =
      parallel_surface(ball_domain(DomainKind::interior, 2.0), 0.5, 32);
  for (const Point& p : inner_pts)
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(1.5).epsilon(1e-10));

  const DomainSpec eo = ellipse_domain(DomainKind::exterior, 2.0, 1.0);
  for (const Point& p : parallel_surface(eo, 0.3, 64))
    CHECK(exact_signed_distance(eo, p) == doctest::Approx(0.3).epsilon(1e-7));
}

TEST_CASE("curvature products") {
  const DomainSpec disk2 = ball_domain(DomainKind::interior, 2.0);
  for (const Point& p : boundary_points(disk2, 0, 16))
    CHECK(curvature_product(disk2, p, 1.0) == doctest::Approx(0.5));

  const DomainSpec ball3 = ball_domain(DomainKind::interior, 2.0, {0, 0, 0}, 3);
  CHECK(curvature_product(ball3, {2.0, 0.0, 0.0}, 1.0) ==
        doctest::Approx(0.25));

  const DomainSpec ei = ellipse_domain(DomainKind::interior, 2.0, 1.0);
  CHECK(curvature_product(ei, {2.0, 0.0, 0.0}, 0.25) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(curvature_product(ei, {0.0, 1.0, 0.0}, 0.25) ==
        doctest::Approx(3.75).epsilon(1e-9));

  // Offset at the focal distance: curvature 1/2 meets 1/R for R = 2.
  CHECK_THROWS_AS(curvature_product(disk2, Point{2.0, 0.0, 0.0}, 2.5),
                  CausticError);
}

TEST_CASE("under-resolved marching grid is rejected") {
  const DomainSpec tiny = ball_domain(DomainKind::exterior, 0.05);
  CHECK_THROWS_AS(fast_march_distance(tiny, box_grid(-1.0, 1.0, 0.05)),
                  ResolutionError);
}
