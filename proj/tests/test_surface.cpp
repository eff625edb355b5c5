#include <doctest.h>

#include <cmath>
#include <random>

#include "fermi/error.hpp"
#include "fermi/surface.hpp"

using namespace fermi;

namespace {

double ellipse_curvature(double a, double b, double t) {
  return a * b / std::pow(a * a * std::sin(t) * std::sin(t) + b * b * std::cos(t) * std::cos(t), 1.5);
}

}  // namespace

TEST_CASE("Fermi radius of the wrapped quadratic is sqrt(2 mu)") {
  auto e = make_dispersion("wrapped-quadratic", {0.5});
  for (double th : {0.0, 0.7, 2.0, 4.5}) CHECK(fermi_radius(*e, th, default_bracket(th)) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(level_radius(*e, 0.105, 0.3, default_bracket(0.3)) == doctest::Approx(1.1).epsilon(1e-13));
  auto t = trace_surface(*e, 128);
  CHECK(t.size() == 128);
  CHECK(t.theta[1] == doctest::Approx(kTwoPi / 128));
  CHECK_THROWS_AS(trace_surface(*e, 32), Error);
}

TEST_CASE("Fermi radius of an ellipse matches the closed form") {
  double a = 1.5, b = 0.6;
  auto e = make_dispersion("ellipse", {a, b});
  for (double th = 0; th < kTwoPi; th += 0.37) {
    double expect = 1.0 / std::sqrt(std::pow(std::cos(th) / a, 2) + std::pow(std::sin(th) / b, 2));
    CHECK(fermi_radius(*e, th, default_bracket(th)) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("tight-binding surfaces") {
  auto e = make_dispersion("tight-binding", {1.0, -1.0});
  // cos p1 + cos p2 = 1/2 on the axis: p1 = arccos(-1/2)
  CHECK(fermi_radius(*e, 0.0, default_bracket(0.0)) == doctest::Approx(std::acos(-0.5)).epsilon(1e-12));
  auto wide = check_class(*e, {0.1, 0.5, 10.0, 0.5}, 128);
  CHECK(wide.trace_failures == 0);
  CHECK(wide.margin_half_cell < 0.0);
  CHECK_FALSE(wide.verdict);
  auto pocket = make_dispersion("tight-binding", {1.0, -3.0});
  CHECK(fermi_radius(*pocket, 0.0, default_bracket(0.0)) == doctest::Approx(std::acos(0.5)).epsilon(1e-12));
  auto rep = check_class(*pocket, {0.1, 0.5, 20.0, 0.3}, 128);
  CHECK(rep.trace_failures == 0);
  CHECK(rep.verdict);
}

TEST_CASE("tight-binding roots and inversion symmetry") {
  auto e = make_dispersion("tight-binding", {1.0, -2.0 + 1e-3});
  double r = fermi_radius(*e, 0.0, default_bracket(0.0));
  CHECK(std::abs(e->value({r, 0.0})) <= 1e-12);
  auto s = make_dispersion("tight-binding", {1.0, -1.0});
  auto t = trace_surface(*s, 256);
  for (int i = 0; i < 128; ++i) CHECK(std::abs(t.radius[i] - t.radius[i + 128]) <= 1e-10);
}

TEST_CASE("rootfinder errors") {
  auto e = make_dispersion("wrapped-quadratic", {0.5});
  CHECK_THROWS_AS(fermi_radius(*e, 0.0, {1.5, 2.0}), Error);
  CHECK_THROWS_AS(fermi_radius(*e, 0.0, {2.0, 1.5}), Error);
  try {
    fermi_radius(*e, 0.0, {1.5, 2.0});
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::Geometry);
  }
  // a hole-like surface: e decreases along the ray
  auto h = make_dispersion("tight-binding", {1.0, 0.5});
  CHECK_THROWS_AS(fermi_radius(*h, 0.0, default_bracket(0.0)), Error);
}

TEST_CASE("class check on the wrapped quadratic") {
  auto e = make_dispersion("wrapped-quadratic", {0.5});
  auto rep = check_class(*e, {0.1, 0.5, 10.0, 0.5}, 256);
  CHECK(rep.verdict);
  CHECK(rep.margin_gradient == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.margin_curvature == doctest::Approx(0.5).epsilon(1e-9));
  auto strict = check_class(*e, {0.1, 1.2, 10.0, 0.5}, 256);
  CHECK_FALSE(strict.verdict);
  CHECK(strict.margin_gradient < 0);
  auto small_g = check_class(*e, {0.1, 0.5, 5.0, 0.3}, 256);
  CHECK_FALSE(small_g.verdict);
  CHECK_THROWS_AS(check_class(*e, {0.1, 0.5, 0.4, 0.5}, 256), Error);
}

TEST_CASE("surface around the M point fails the curvature condition") {
  auto e = make_dispersion("tight-binding", {1.0, 0.5});
  auto rep = check_class(*e, {0.1, 0.5, 10.0, 0.5}, 128);
  CHECK(rep.trace_failures > 0);
  CHECK(rep.margin_curvature < 0);
  CHECK_FALSE(rep.verdict);
}

TEST_CASE("curvature matches the ellipse formula") {
  double a = 1.2, b = 0.8;
  auto e = make_dispersion("ellipse", {a, b});
  for (double t = 0; t < kTwoPi; t += 0.2)
    CHECK(curvature(*e, {a * std::cos(t), b * std::sin(t)}) == doctest::Approx(ellipse_curvature(a, b, t)).epsilon(1e-12));
}

TEST_CASE("convex center lemma on ellipses") {
  for (auto [a, b] : {std::pair{1.2, 0.8}, std::pair{1.5, 0.6}, std::pair{1.0, 1.0}}) {
    auto e = make_dispersion("ellipse", {a, b});
    auto rep = convex_center(trace_surface(*e, 512), *e);
    CHECK(rep.radius_bounds);
    CHECK(rep.angle_bound);
    CHECK(rep.symmetric_center);
    CHECK(norm(rep.center) < 1e-8);
  }
  auto shifted = make_dispersion("ellipse", {1.0, 0.7, 0.2, -0.1});
  auto rep = convex_center(trace_surface(*shifted, 512), *shifted);
  CHECK(rep.center.x == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(rep.radius_bounds);
}

TEST_CASE("offset surface of a circle is concentric") {
  auto e = make_dispersion("circle", {1.0});
  auto t = trace_surface(*e, 128);
  auto off = offset_surface(t, *e, 2.0);
  for (const auto& p : off) CHECK(norm(p) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(offset_surface(t, *e, 0.5), Error);
}

TEST_CASE("radial constants follow the explicit choices") {
  ClassParams p{0.1, 0.5, 10.0, 0.5};
  auto c = derive_radial_constants(p);
  CHECK(c.g1 == 0.5 * 0.25 / 400.0);
  CHECK(c.r0 == std::min(c.g1 / 10.0, 0.1));
  auto e = make_dispersion("wrapped-quadratic", {0.5});
  auto t = trace_surface(*e, 128);
  CHECK(min_radial_derivative(*e, t, c.r0) > 2 * c.g1);
  CHECK(min_radial_derivative(*e, t, 0.1) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("annulus brackets bound the reference radius") {
  auto e = make_dispersion("ellipse", {1.2, 0.8});
  auto t = trace_surface(*e, 64);
  auto br = annulus_brackets(t, 0.1);
  for (int i = 0; i < t.size(); ++i) {
    CHECK(br[i].lo == doctest::Approx(t.radius[i] - 0.2));
    CHECK(br[i].hi == doctest::Approx(t.radius[i] + 0.2));
  }
  auto t2 = trace_surface(*e, 64, br);
  for (int i = 0; i < t.size(); ++i) CHECK(t2.radius[i] == doctest::Approx(t.radius[i]).epsilon(1e-14));
}

TEST_CASE("worked geometry examples") {
  auto wq = make_dispersion("wrapped-quadratic", {0.5});
  auto t = trace_surface(*wq, 256);
  for (double r : t.radius) CHECK(std::abs(r - 1.0) <= 1e-12);
  CHECK_THROWS_AS(fermi_radius(*wq, 0.0, {2.9, 3.1}), Error);
  auto g2 = check_class(*wq, {0.1, 2.0, 10.0, 0.5}, 256);
  CHECK_FALSE(g2.verdict);
  CHECK(g2.margin_gradient == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(curvature(*wq, {std::cos(0.3), std::sin(0.3)}) == doctest::Approx(1.0).epsilon(1e-12));

  auto el = make_dispersion("ellipse", {1.2, 0.8});
  CHECK(fermi_radius(*el, 0.0, default_bracket(0.0)) == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(fermi_radius(*el, kPi / 2, default_bracket(kPi / 2)) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(curvature(*el, {1.2, 0.0}) == doctest::Approx(1.875).epsilon(1e-12));
  auto te = trace_surface(*el, 1024);
  auto rep = convex_center(te, *el);
  CHECK(rep.k_min == doctest::Approx(0.8 / 1.44).epsilon(1e-6));
  CHECK(rep.k_max == doctest::Approx(1.875).epsilon(1e-6));
  CHECK(rep.min_distance == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(rep.max_distance == doctest::Approx(1.2).epsilon(1e-9));

  auto offset = offset_surface(te, *el, 4.0);
  for (std::size_t i = 0; i < offset.size(); ++i) {
    Vec2 a = offset[i], b = offset[(i + 1) % offset.size()], c = offset[(i + 2) % offset.size()];
    double cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    CHECK(cross > 0.0);
  }
  CHECK_THROWS_AS(offset_surface(te, *el, 0.5), Error);

  auto shifted = make_dispersion("circle", {1.0, 0.3, 0.0});
  auto sc = convex_center(trace_surface(*shifted, 1024), *shifted);
  CHECK(std::abs(sc.center.x - 0.3) <= kTwoPi / 1024);
  CHECK(std::abs(sc.center.y) <= kTwoPi / 1024);

  auto c = derive_radial_constants({0.1, 1.0, 1.01, 1.0});
  CHECK(c.g1 / 1.01 > 0.1);
  CHECK(c.r0 == 0.1);
}
