#include "fermi/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fermi/error.hpp"

namespace fermi {

void ClassParams::validate() const {
  if (!(delta0 > 0 && g0 > 0 && G0 > 0 && omega0 > 0))
    fail(ErrorCode::InvalidArgument, "class parameters must be positive");
  if (!(G0 > std::max(g0, omega0))) fail(ErrorCode::InvalidArgument, "G0 must exceed max(g0, omega0)");
}

Bracket default_bracket(double theta) {
  return {0.05, BrillouinTorus::ray_to_cell_boundary(theta) - 0.01};
}

namespace {

constexpr int kBracketSamples = 33;

double radial_value(const Dispersion& e, double r, double theta, double rho) {
  return e.value(polar_point(r, theta)) - rho;
}

double radial_slope(const Dispersion& e, double r, double theta) {
  Jet j = e.jet(polar_point(r, theta), 1);
  return j.grad.x * std::cos(theta) + j.grad.y * std::sin(theta);
}

}  // namespace

double level_radius(const Dispersion& e, double rho, double theta, Bracket b) {
  if (!(b.hi > b.lo)) fail(ErrorCode::Geometry, "empty bracket");
  double lo = 0, hi = 0;
  int changes = 0;
  double prev_r = b.lo;
  bool prev_neg = radial_value(e, b.lo, theta, rho) < 0.0;
  for (int k = 1; k < kBracketSamples; ++k) {
    double r = b.lo + (b.hi - b.lo) * k / (kBracketSamples - 1);
    bool neg = radial_value(e, r, theta, rho) < 0.0;
    if (neg != prev_neg) {
      if (changes == 0) {
        lo = prev_r;
        hi = r;
      }
      ++changes;
    }
    prev_neg = neg;
    prev_r = r;
  }
  if (changes == 0) fail(ErrorCode::Geometry, "no sign change in bracket");
  if (changes > 1) fail(ErrorCode::Geometry, "non-monotone radial profile in bracket");
  if (radial_value(e, lo, theta, rho) >= 0.0) fail(ErrorCode::Geometry, "non-monotone radial profile in bracket");
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = radial_value(e, mid, theta, rho);
    if (fm < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double r = 0.5 * (lo + hi);
  double f = radial_value(e, r, theta, rho);
  for (int it = 0; it < 5 && f != 0.0; ++it) {
    double d = radial_slope(e, r, theta);
    if (!(d > 0.0)) break;
    double rn = r - f / d;
    if (rn < b.lo || rn > b.hi) break;
    double fn = radial_value(e, rn, theta, rho);
    if (std::abs(fn) >= std::abs(f)) break;
    r = rn;
    f = fn;
  }
  if (!(radial_slope(e, r, theta) > 0.0)) fail(ErrorCode::Geometry, "radial derivative not positive at root");
  return r;
}

double fermi_radius(const Dispersion& e, double theta, Bracket bracket) {
  return level_radius(e, 0.0, theta, bracket);
}

FermiRadiusTable trace_surface(const Dispersion& e, int m_theta, const std::vector<Bracket>& brackets) {
  if (m_theta < 64) fail(ErrorCode::InvalidArgument, "at least 64 angles are required");
  if (!brackets.empty() && static_cast<int>(brackets.size()) != m_theta)
    fail(ErrorCode::InvalidArgument, "bracket table size mismatch");
  FermiRadiusTable t;
  t.theta.resize(m_theta);
  t.radius.resize(m_theta);
  t.r_under.resize(m_theta);
  t.r_over.resize(m_theta);
  for (int i = 0; i < m_theta; ++i) {
    double th = angle_of(i, m_theta);
    Bracket b = brackets.empty() ? default_bracket(th) : brackets[i];
    t.theta[i] = th;
    t.r_under[i] = b.lo;
    t.r_over[i] = b.hi;
    try {
      t.radius[i] = fermi_radius(e, th, b);
    } catch (const Error& err) {
      fail(err.code(), std::string(err.what()) + " at theta index " + std::to_string(i));
    }
  }
  return t;
}

std::vector<Bracket> annulus_brackets(const FermiRadiusTable& reference, double r0) {
  std::vector<Bracket> out(reference.size());
  for (int i = 0; i < reference.size(); ++i)
    out[i] = {std::max(reference.radius[i] - 2 * r0, 1e-3), reference.radius[i] + 2 * r0};
  return out;
}

double curvature_form(const Dispersion& e, Vec2 p) {
  Jet j = e.jet(p, 2);
  double g = norm(j.grad);
  if (!(g > 0.0)) fail(ErrorCode::Geometry, "vanishing gradient");
  double tx = -j.grad.y / g, ty = j.grad.x / g;
  return tx * (j.hxx * tx + j.hxy * ty) + ty * (j.hxy * tx + j.hyy * ty);
}

double curvature(const Dispersion& e, Vec2 p) {
  double g = norm(e.jet(p, 1).grad);
  if (!(g > 0.0)) fail(ErrorCode::Geometry, "vanishing gradient");
  return curvature_form(e, p) / g;
}

ClassReport check_class(const Dispersion& e, const ClassParams& params, int m_theta,
                        const std::vector<Bracket>& brackets, int norm_grid) {
  params.validate();
  if (m_theta < 64) fail(ErrorCode::InvalidArgument, "at least 64 angles are required");
  ClassReport rep;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_grad = min_margin, min_form = min_margin;
  for (int i = 0; i < m_theta; ++i) {
    double th = angle_of(i, m_theta);
    Bracket b = brackets.empty() ? default_bracket(th) : brackets.at(i);
    double r;
    try {
      r = fermi_radius(e, th, b);
    } catch (const Error& err) {
      if (rep.trace_failures == 0) rep.first_failure = std::string(err.what()) + " at theta index " + std::to_string(i);
      ++rep.trace_failures;
      continue;
    }
    ++rep.traced;
    Vec2 p = polar_point(r, th);
    min_margin = std::min(min_margin, BrillouinTorus::half_cell_margin(p));
    min_grad = std::min(min_grad, norm(e.jet(p, 1).grad));
    min_form = std::min(min_form, curvature_form(e, p));
  }
  if (rep.traced == 0) fail(ErrorCode::Geometry, "surface could not be traced: " + rep.first_failure);
  rep.c2_norm = sampled_c2_norm(e, norm_grid);
  rep.margin_half_cell = min_margin - params.delta0;
  rep.margin_gradient = min_grad - params.g0;
  rep.margin_c2 = params.G0 - rep.c2_norm;
  rep.margin_curvature = min_form - params.omega0;
  rep.verdict = rep.trace_failures == 0 && rep.margin_half_cell > kClassGuardBand &&
                rep.margin_gradient > kClassGuardBand && rep.margin_c2 > kClassGuardBand &&
                rep.margin_curvature > kClassGuardBand;
  return rep;
}

ConvexCenterReport convex_center(const FermiRadiusTable& table, const Dispersion& e) {
  int m = table.size();
  if (m < 3) fail(ErrorCode::InvalidArgument, "table too small");
  std::vector<Vec2> p(m);
  std::vector<double> kappa(m);
  for (int i = 0; i < m; ++i) {
    p[i] = table.point(i);
    kappa[i] = curvature(e, p[i]);
    if (!(kappa[i] > 0.0)) fail(ErrorCode::Geometry, "non-convex sample at theta index " + std::to_string(i));
  }
  ConvexCenterReport rep;
  double best = -1.0;
  int bi = 0, bj = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Vec2 d = p[i] - p[j];
      double d2 = dot(d, d);
      if (d2 > best) {
        best = d2;
        bi = i;
        bj = j;
      }
    }
  rep.c1 = p[bi];
  rep.c2 = p[bj];
  rep.center = 0.5 * (p[bi] + p[bj]);
  rep.min_distance = std::numeric_limits<double>::infinity();
  rep.max_distance = 0.0;
  rep.min_cos_angle = std::numeric_limits<double>::infinity();
  rep.k_min = *std::min_element(kappa.begin(), kappa.end());
  rep.k_max = *std::max_element(kappa.begin(), kappa.end());
  for (int i = 0; i < m; ++i) {
    Vec2 d = p[i] - rep.center;
    double dist = norm(d);
    rep.min_distance = std::min(rep.min_distance, dist);
    rep.max_distance = std::max(rep.max_distance, dist);
    Vec2 g = e.jet(p[i], 1).grad;
    rep.min_cos_angle = std::min(rep.min_cos_angle, dot(d, g) / (dist * norm(g)));
  }
  rep.slack = 10.0 * kTwoPi / m;
  rep.radius_bounds = rep.min_distance >= 1.0 / rep.k_max - rep.slack &&
                      rep.max_distance <= 1.0 / rep.k_min + rep.slack;
  rep.angle_bound = rep.min_cos_angle >= rep.k_min / rep.k_max - rep.slack;
  rep.symmetric_center = !e.symmetric() || norm(rep.center) <= 1e-8;
  return rep;
}

std::vector<Vec2> offset_surface(const FermiRadiusTable& table, const Dispersion& e, double L) {
  double kmax = 0.0;
  for (int i = 0; i < table.size(); ++i) kmax = std::max(kmax, curvature(e, table.point(i)));
  if (!(L > kmax)) fail(ErrorCode::InvalidArgument, "offset parameter must exceed the maximal curvature");
  std::vector<Vec2> out(table.size());
  for (int i = 0; i < table.size(); ++i) {
    Vec2 p = table.point(i);
    Vec2 g = e.jet(p, 1).grad;
    out[i] = p - (1.0 / (L * norm(g))) * g;
  }
  return out;
}

RadialConstants derive_radial_constants(const ClassParams& params) {
  params.validate();
  RadialConstants c;
  c.g1 = params.omega0 * params.g0 * params.g0 / (4.0 * params.G0 * params.G0);
  c.r0 = std::min(c.g1 / params.G0, params.delta0);
  c.eps_max = c.g1;
  return c;
}

double min_radial_derivative(const Dispersion& e, const FermiRadiusTable& reference, double r0, int nr) {
  double out = std::numeric_limits<double>::infinity();
  for (int i = 0; i < reference.size(); ++i) {
    double th = reference.theta[i];
    for (int k = 0; k < nr; ++k) {
      double r = reference.radius[i] - 2 * r0 + 4 * r0 * k / (nr - 1);
      out = std::min(out, radial_slope(e, r, th));
    }
  }
  return out;
}

}  // namespace fermi
