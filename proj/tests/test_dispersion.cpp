#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "fermi/config.hpp"
#include "fermi/dispersion.hpp"
#include "fermi/error.hpp"
#include "fermi/interaction.hpp"

using namespace fermi;

namespace {

// Central-difference oracle built from values only.
Jet fd_jet(const ScalarField& f, Vec2 p, double h = 1e-4) {
  Jet j;
  auto v = [&](double dx, double dy) { return f.value({p.x + dx, p.y + dy}); };
  j.value = v(0, 0);
  j.grad = {(v(h, 0) - v(-h, 0)) / (2 * h), (v(0, h) - v(0, -h)) / (2 * h)};
  j.hxx = (v(h, 0) - 2 * j.value + v(-h, 0)) / (h * h);
  j.hyy = (v(0, h) - 2 * j.value + v(0, -h)) / (h * h);
  j.hxy = (v(h, h) - v(h, -h) - v(-h, h) + v(-h, -h)) / (4 * h * h);
  return j;
}

void check_jets(const ScalarField& f, std::mt19937_64& rng, int n, double tol1, double tol2) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int k = 0; k < n; ++k) {
    Vec2 p{u(rng), u(rng)};
    Jet a = f.jet(p, 2), b = fd_jet(f, p);
    CHECK(std::abs(a.grad.x - b.grad.x) <= tol1);
    CHECK(std::abs(a.grad.y - b.grad.y) <= tol1);
    CHECK(std::abs(a.hxx - b.hxx) <= tol2);
    CHECK(std::abs(a.hxy - b.hxy) <= tol2);
    CHECK(std::abs(a.hyy - b.hyy) <= tol2);
  }
}

}  // namespace

TEST_CASE("wrapped quadratic is |p|^2/2 - mu near the origin") {
  auto e = make_dispersion("wrapped-quadratic", {0.5});
  CHECK(e->value({0, 0}) == doctest::Approx(-0.5));
  CHECK(e->value({0.6, -0.7}) == doctest::Approx(0.5 * (0.36 + 0.49) - 0.5));
  Jet j = e->jet({0.3, 0.4}, 2);
  CHECK(j.grad.x == doctest::Approx(0.3));
  CHECK(j.grad.y == doctest::Approx(0.4));
  CHECK(j.hxx == doctest::Approx(1.0));
  CHECK(j.hxy == doctest::Approx(0.0));
  CHECK(e->symmetric());
}

TEST_CASE("wrapped quadratic is periodic, smooth and has |E|_2 below 10") {
  auto e = make_dispersion("wrapped-quadratic", {0.5});
  std::mt19937_64 rng(1);
  check_jets(*e, rng, 200, 1e-6, 1e-4);
  CHECK(e->value({kPi - 1e-9, 0.2}) == doctest::Approx(e->value({-kPi + 1e-9, 0.2})).epsilon(1e-7));
  double n2 = sampled_c2_norm(*e, 256);
  CHECK(n2 > 9.0);
  CHECK(n2 < 10.0);
}

TEST_CASE("periodic quadratic profile joins with matching derivatives") {
  PeriodicQuadratic phi(1.2);
  for (double x : {1.2, 1.2 + 0.4 * (kPi - 1.2)}) {
    double f0, d0, dd0, f1, d1, dd1;
    phi.eval(x - 1e-9, f0, d0, dd0);
    phi.eval(x + 1e-9, f1, d1, dd1);
    CHECK(f0 == doctest::Approx(f1).epsilon(1e-8));
    CHECK(d0 == doctest::Approx(d1).epsilon(1e-7));
    CHECK(std::abs(dd0 - dd1) < 1e-6);
  }
  double f, d, dd;
  phi.eval(kPi, f, d, dd);
  CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("dispersion factory rejects empty and oversized Fermi seas") {
  CHECK_THROWS_AS(make_dispersion("wrapped-quadratic", {0.0}), Error);
  CHECK_THROWS_AS(make_dispersion("wrapped-quadratic", {0.8}), Error);
  CHECK_THROWS_AS(make_dispersion("tight-binding", {1.0, -4.0}), Error);
  CHECK_THROWS_AS(make_dispersion("tight-binding", {1.0, 4.5}), Error);
  CHECK_THROWS_AS(make_dispersion("no-such-family", {1.0}), Error);
  CHECK_THROWS_AS(make_dispersion("ellipse", {1.0}), Error);
}

TEST_CASE("tight-binding jets are analytic") {
  auto e = make_dispersion("tight-binding", {1.0, -1.0});
  CHECK(e->value({0, 0}) == doctest::Approx(-4.0 + 1.0));
  std::mt19937_64 rng(2);
  check_jets(*e, rng, 100, 1e-7, 1e-5);
}

TEST_CASE("tight-binding at half filling") {
  auto e = make_dispersion("tight-binding", {1.0, 0.0});
  CHECK(std::abs(e->value({kPi / 2, kPi / 2})) < 1e-15);
  Jet j = e->jet({0.0, 0.0}, 2);
  CHECK(j.value == -4.0);
  CHECK(j.grad.x == 0.0);
  CHECK(j.grad.y == 0.0);
  CHECK(j.hxx == 2.0);
  CHECK(j.hyy == 2.0);
  CHECK(j.hxy == 0.0);
}

TEST_CASE("ellipse family has the analytic level set") {
  auto e = make_dispersion("ellipse", {1.2, 0.8});
  for (double t = 0; t < kTwoPi; t += 0.3) CHECK(std::abs(e->value({1.2 * std::cos(t), 0.8 * std::sin(t)})) < 1e-13);
  auto c = make_dispersion("circle", {1.0, 0.1, -0.2});
  CHECK(std::abs(c->value({1.1, -0.2})) < 1e-13);
  CHECK_FALSE(c->symmetric());
}

TEST_CASE("periodic spline reproduces a smooth dispersion") {
  auto tb = make_dispersion("tight-binding", {1.0, -1.0});
  auto g = sample_to_grid(*tb, 64);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  double err0 = 0, err1 = 0, err2 = 0;
  for (int k = 0; k < 1000; ++k) {
    Vec2 p{u(rng), u(rng)};
    Jet a = g->jet(p, 2), b = tb->jet(p, 2);
    err0 = std::max(err0, std::abs(a.value - b.value));
    err1 = std::max({err1, std::abs(a.grad.x - b.grad.x), std::abs(a.grad.y - b.grad.y)});
    err2 = std::max({err2, std::abs(a.hxx - b.hxx), std::abs(a.hyy - b.hyy), std::abs(a.hxy - b.hxy)});
  }
  CHECK(err0 < 1e-6);
  CHECK(err1 < 1e-4);
  CHECK(err2 < 1e-2);
  // nodes are interpolated exactly
  CHECK(g->value({-kPi + 5 * kTwoPi / 64, -kPi + 9 * kTwoPi / 64}) ==
        doctest::Approx(tb->value({-kPi + 5 * kTwoPi / 64, -kPi + 9 * kTwoPi / 64})).epsilon(1e-12));
}

TEST_CASE("grid dispersion CSV round trip") {
  auto tb = make_dispersion("tight-binding", {1.0, 0.3});
  std::string csv = grid_dispersion_csv(*tb, 16);
  std::string path = std::string(FERMI_TEST_TMP) + "/grid16.csv";
  {
    std::ofstream f(path);
    f << csv;
  }
  auto g = read_grid_dispersion_csv(path, true);
  CHECK(g->value({-kPi, -kPi}) == doctest::Approx(tb->value({-kPi, -kPi})).epsilon(1e-15));
  {
    std::ofstream f(path);
    f << "4\n1,2,3\n";
  }
  CHECK_THROWS_AS(read_grid_dispersion_csv(path, true), Error);
  CHECK_THROWS_AS(make_grid_dispersion(4, std::vector<double>(16, 1.0), true), Error);
}

TEST_CASE("finite-difference jets approximate the analytic ones") {
  auto tb = make_dispersion("tight-binding", {1.0, -1.0});
  FiniteDifferenceDispersion fd(tb, 1e-3);
  Jet a = fd.jet({0.4, -1.1}, 2), b = tb->jet({0.4, -1.1}, 2);
  CHECK(std::abs(a.grad.x - b.grad.x) < 1e-6);
  CHECK(std::abs(a.hyy - b.hyy) < 1e-5);
  CHECK_THROWS_AS(evaluate_jet(*tb, {0, 0}, 3), Error);
}

TEST_CASE("angular series interpolates and differentiates") {
  int m = 64;
  std::vector<double> s(m);
  for (int i = 0; i < m; ++i) s[i] = std::cos(2 * kTwoPi * i / m) + 0.5 * std::sin(kTwoPi * i / m);
  AngularSeries a(s);
  for (int i = 0; i < m; i += 7) CHECK(a(kTwoPi * i / m) == doctest::Approx(s[i]).epsilon(1e-12));
  double f, df, ddf, t = 0.37;
  a.eval(t, f, df, ddf);
  CHECK(df == doctest::Approx(-2 * std::sin(2 * t) + 0.5 * std::cos(t)).epsilon(1e-10));
  CHECK(ddf == doctest::Approx(-4 * std::cos(2 * t) - 0.5 * std::sin(t)).epsilon(1e-10));
  CHECK_FALSE(a.symmetric_under_pi());
}

TEST_CASE("windowed angular field has consistent jets and support") {
  int m = 64;
  std::vector<double> s(m);
  for (int i = 0; i < m; ++i) s[i] = 0.1 * std::cos(3 * kTwoPi * i / m);
  WindowedAngularField w(RadialWindow(0.8, 1.2), AngularSeries(s));
  std::mt19937_64 rng(4);
  check_jets(w, rng, 200, 1e-6, 1e-4);
  CHECK(w.value({0.05, 0.05}) == 0.0);
  CHECK(w.value({3.0, 0.0}) == 0.0);
  CHECK(w.value({1.0, 0.0}) == doctest::Approx(0.1));
}

TEST_CASE("trigonometric polynomial norm bound dominates the sampled norm") {
  TrigPolynomial t({{1, 0, 0.3, 0.0}, {1, 2, 0.1, -0.2}, {0, 3, 0.0, 0.05}});
  std::mt19937_64 rng(5);
  check_jets(t, rng, 50, 1e-6, 1e-4);
  CHECK(sampled_c2_norm(t, 128) <= t.norm_bound(2) + 1e-12);
}

TEST_CASE("interaction class checks") {
  auto c = check_interaction(*Interaction::constant(0.5));
  CHECK(c.all());
  auto cos = check_interaction(*Interaction::cosine(1.0));
  CHECK(cos.reflection);
  CHECK(cos.symmetric);
  CHECK(cos.c2_norm == doctest::Approx(6.0).epsilon(1e-2));
  CHECK_FALSE(cos.bounded);
  auto d = check_interaction(*Interaction::decaying(Interaction::Shape::Constant, 0.1, 1.5, 0.05));
  REQUIRE(d.fitted_alpha.has_value());
  CHECK(*d.fitted_alpha == doctest::Approx(1.5).epsilon(0.05));
  CHECK(d.decay);
  auto v = Interaction::cosine(1.0);
  CHECK(interaction_distance(*v, *v->scaled(1.1)) == doctest::Approx(0.1 * cos.c2_norm).epsilon(1e-9));
}
