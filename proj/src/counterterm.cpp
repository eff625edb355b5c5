#include "fermi/counterterm.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "fermi/error.hpp"

namespace fermi {

namespace {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

struct Nodes {
  std::vector<double> x;  // on [-1, 1]
  std::vector<double> w;
};

template <unsigned N>
Nodes legendre() {
  using G = boost::math::quadrature::gauss<double, N>;
  Nodes n;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) {
      n.x.push_back(0.0);
      n.w.push_back(w[k]);
    } else {
      n.x.push_back(-a[k]);
      n.w.push_back(w[k]);
      n.x.push_back(a[k]);
      n.w.push_back(w[k]);
    }
  }
  return n;
}

const Nodes& legendre_nodes(int order) {
  static const Nodes n8 = legendre<8>(), n16 = legendre<16>(), n24 = legendre<24>(), n32 = legendre<32>(),
                     n48 = legendre<48>(), n64 = legendre<64>();
  switch (order) {
    case 8: return n8;
    case 16: return n16;
    case 24: return n24;
    case 32: return n32;
    case 48: return n48;
    case 64: return n64;
    default: fail(ErrorCode::InvalidArgument, "quadrature order must be one of 8, 16, 24, 32, 48, 64");
  }
}

struct PlaneNodes {
  std::vector<Vec2> q;
  std::vector<double> w;  // includes the d^2q/(2pi)^2 measure
};

void add_segment(PlaneNodes& out, double theta, double a, double b, double dtheta, const Nodes& gl,
                 const std::function<double(Vec2)>& occupation) {
  if (!(b > a)) return;
  double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  double c = std::cos(theta), s = std::sin(theta);
  for (std::size_t k = 0; k < gl.x.size(); ++k) {
    double r = mid + half * gl.x[k];
    Vec2 q{r * c, r * s};
    double w = gl.w[k] * half * r * dtheta / (kTwoPi * kTwoPi);
    double n = occupation ? occupation(q) : 1.0;
    if (n == 0.0) continue;
    out.q.push_back(q);
    out.w.push_back(w * n);
  }
}

AngularSamples first_order(const PlaneNodes& nodes, const Interaction& v, double lambda,
                           const FermiRadiusTable& table) {
  AngularSamples k(table.size(), 0.0);
  if (lambda == 0.0) return k;
  double volume = 0.0;
  for (double w : nodes.w) volume += w;
  double hartree = kHartreeSpinWeight * v.instantaneous({0.0, 0.0}) * volume;
  for (int i = 0; i < table.size(); ++i) {
    Vec2 p = table.point(i);
    double ex = 0.0;
    for (std::size_t n = 0; n < nodes.q.size(); ++n) ex += nodes.w[n] * v.instantaneous(p - nodes.q[n]);
    k[i] = lambda * (hartree - kExchangeWeight * ex);
  }
  return k;
}

// Radius along the ray at which e reaches the level, clamped to [0, ray end].
double radius_at_level(const Dispersion& e, double level, double theta) {
  double end = BrillouinTorus::ray_to_cell_boundary(theta);
  if (e.value({0.0, 0.0}) >= level) return 0.0;
  if (e.value(polar_point(end, theta)) <= level) return end;
  return level_radius(e, level, theta, {0.0, end});
}

void require_instantaneous(const Interaction& v) {
  if (!v.is_instantaneous()) fail(ErrorCode::InvalidArgument, "counterterm quadrature needs an instantaneous interaction");
}

GridField to_field(const AngularSamples& k, const Annulus& grid) {
  return GridField::ray_constant(k, grid.r_min, grid.r_max, grid.nr);
}

}  // namespace

double ScaleCutoff::profile(double x) const { return smooth_step((1.0 - x) / (1.0 - 1.0 / (M * M))); }

double ScaleCutoff::chi(int j, double x) const {
  double s = std::pow(M, j), s1 = std::pow(M, j - 1);
  return profile(x * x / (s * s)) - profile(x * x / (s1 * s1));
}

double ScaleCutoff::smooth_part(double eps) const {
  if (eps == 0.0) return 0.0;
  double t = eps * eps;
  if (t >= 1.0) return eps > 0.0 ? 0.5 : -0.5;
  double upper = std::sqrt(1.0 - t);
  double lower = std::sqrt(std::max(0.0, 1.0 / (M * M) - t));
  auto f = [&](double u) {
    double x = u * u + t;
    return (1.0 - profile(x)) / x;
  };
  double g = 0.0;
  if (upper > lower) g = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lower, upper, 15, 1e-13);
  double st = std::sqrt(t);
  g += (kPi / 2.0 - std::atan(upper / st)) / st;
  return eps / kPi * g;
}

double ScaleCutoff::occupation(int j, double e) const {
  if (j == 1) return 0.5 - smooth_part(e);
  double s = std::pow(M, j), s1 = std::pow(M, j - 1);
  return smooth_part(e / s) - smooth_part(e / s1);
}

void ScaleCutoff::validate() const {
  if (!(M > 1.0)) fail(ErrorCode::InvalidArgument, "scale base must exceed 1");
  if (j_min > 0) fail(ErrorCode::InvalidArgument, "j_min must be <= 0");
}

FockCounterterm::FockCounterterm(InteractionPtr v, double lambda, QuadratureSettings quad)
    : v_(std::move(v)), lambda_(lambda), quad_(quad) {
  require_instantaneous(*v_);
  legendre_nodes(quad_.sea_order);
}

ModelPtr FockCounterterm::with_coupling(double lambda) const {
  return std::make_shared<FockCounterterm>(v_, lambda, quad_);
}

ModelPtr FockCounterterm::with_interaction_scale(double s) const {
  return std::make_shared<FockCounterterm>(v_->scaled(s), lambda_, quad_);
}

double FockCounterterm::interaction_norm() const { return check_interaction(*v_).c2_norm; }

AngularSamples FockCounterterm::evaluate(const Dispersion& e, const FermiRadiusTable& table) const {
  const Nodes& gl = legendre_nodes(quad_.sea_order);
  PlaneNodes nodes;
  double dth = kTwoPi / table.size();
  for (int i = 0; i < table.size(); ++i) add_segment(nodes, table.theta[i], 0.0, table.radius[i], dth, gl, nullptr);
  (void)e;
  return first_order(nodes, *v_, lambda_, table);
}

ScaleResolvedFock::ScaleResolvedFock(InteractionPtr v, double lambda, ScaleCutoff cutoff, QuadratureSettings quad)
    : v_(std::move(v)), lambda_(lambda), cutoff_(cutoff), quad_(quad) {
  require_instantaneous(*v_);
  cutoff_.validate();
  legendre_nodes(quad_.shell_order);
}

ModelPtr ScaleResolvedFock::with_coupling(double lambda) const {
  return std::make_shared<ScaleResolvedFock>(v_, lambda, cutoff_, quad_);
}

ModelPtr ScaleResolvedFock::with_interaction_scale(double s) const {
  return std::make_shared<ScaleResolvedFock>(v_->scaled(s), lambda_, cutoff_, quad_);
}

double ScaleResolvedFock::interaction_norm() const { return check_interaction(*v_).c2_norm; }

AngularSamples ScaleResolvedFock::scale(const Dispersion& e, const FermiRadiusTable& table, int j) const {
  if (j < cutoff_.j_min || j > 1) fail(ErrorCode::InvalidArgument, "scale index out of range");
  const Nodes& gl = legendre_nodes(quad_.shell_order);
  double outer = j == 1 ? 1.0 : std::pow(cutoff_.M, j);
  double inner = j == 1 ? 1.0 / cutoff_.M : std::pow(cutoff_.M, j - 1);
  const double levels[5] = {-outer, -inner, 0.0, inner, outer};
  auto occ = [&](Vec2 q) { return cutoff_.occupation(j, e.value(q)); };
  PlaneNodes nodes;
  double dth = kTwoPi / table.size();
  for (int i = 0; i < table.size(); ++i) {
    double th = table.theta[i];
    std::vector<double> radii;
    if (j == 1) radii.push_back(0.0);
    for (double l : levels) radii.push_back(l == 0.0 ? table.radius[i] : radius_at_level(e, l, th));
    for (std::size_t k = 1; k < radii.size(); ++k) add_segment(nodes, th, radii[k - 1], radii[k], dth, gl, occ);
  }
  return first_order(nodes, *v_, lambda_, table);
}

AngularSamples ScaleResolvedFock::evaluate(const Dispersion& e, const FermiRadiusTable& table) const {
  AngularSamples total(table.size(), 0.0);
  for (int j = cutoff_.j_min; j <= 1; ++j) {
    AngularSamples k = scale(e, table, j);
    for (int i = 0; i < table.size(); ++i) total[i] += k[i];
  }
  return total;
}

ModelPtr FlatScaleModel::with_coupling(double lambda) const {
  return std::make_shared<FlatScaleModel>(lambda, value_, cutoff_);
}

ModelPtr FlatScaleModel::with_interaction_scale(double s) const {
  return std::make_shared<FlatScaleModel>(lambda_, s * value_, cutoff_);
}

AngularSamples FlatScaleModel::scale(const Dispersion&, const FermiRadiusTable& table, int j) const {
  if (j < cutoff_.j_min || j > 1) fail(ErrorCode::InvalidArgument, "scale index out of range");
  return AngularSamples(table.size(), lambda_ * value_);
}

AngularSamples FlatScaleModel::evaluate(const Dispersion& e, const FermiRadiusTable& table) const {
  AngularSamples k(table.size(), 0.0);
  for (int j = cutoff_.j_min; j <= 1; ++j) {
    AngularSamples s = scale(e, table, j);
    for (int i = 0; i < table.size(); ++i) k[i] += s[i];
  }
  return k;
}

SyntheticCounterterm::SyntheticCounterterm(std::string shape, double lambda, double gain, double min_slope,
                                           double shape_slope)
    : shape_(std::move(shape)), lambda_(lambda), gain_(gain), min_slope_(min_slope), shape_slope_(shape_slope) {
  shape_value(shape_, {0.5, 0.5});
  if (!(min_slope_ > 0.0)) fail(ErrorCode::InvalidArgument, "reference radial derivative must be positive");
}

double SyntheticCounterterm::shape_value(const std::string& shape, Vec2 p) {
  if (shape == "one") return 1.0;
  if (shape == "cos") return -(std::cos(p.x) + std::cos(p.y)) / 6.0;
  if (shape == "radius") return norm(p);
  fail(ErrorCode::InvalidArgument, "unknown synthetic shape: " + shape);
}

ModelPtr SyntheticCounterterm::with_coupling(double lambda) const {
  return std::make_shared<SyntheticCounterterm>(shape_, lambda, gain_, min_slope_, shape_slope_);
}

ModelPtr SyntheticCounterterm::with_interaction_scale(double s) const {
  return std::make_shared<SyntheticCounterterm>(shape_, lambda_, s * gain_, min_slope_, shape_slope_);
}

AngularSamples SyntheticCounterterm::evaluate(const Dispersion&, const FermiRadiusTable& table) const {
  AngularSamples k(table.size());
  for (int i = 0; i < table.size(); ++i) k[i] = lambda_ * gain_ * shape_value(shape_, table.point(i));
  return k;
}

std::optional<double> SyntheticCounterterm::lipschitz_constant() const {
  return std::abs(gain_) * shape_slope_ / (0.5 * min_slope_);
}

std::shared_ptr<const SyntheticCounterterm> make_synthetic(const std::string& shape, double lambda, double gain,
                                                           std::optional<double> lipschitz, const Dispersion& E,
                                                           const FermiRadiusTable& reference, double r0) {
  double min_slope = min_radial_derivative(E, reference, r0);
  double shape_slope = 0.0;
  const double h = 1e-5;
  for (int i = 0; i < reference.size(); ++i) {
    double th = reference.theta[i];
    for (int k = 0; k < 9; ++k) {
      double r = reference.radius[i] - 2 * r0 + 4 * r0 * k / 8.0;
      double d = (SyntheticCounterterm::shape_value(shape, polar_point(r + h, th)) -
                  SyntheticCounterterm::shape_value(shape, polar_point(r - h, th))) /
                 (2 * h);
      shape_slope = std::max(shape_slope, std::abs(d));
    }
  }
  if (lipschitz) {
    if (!(shape_slope > 0.0)) fail(ErrorCode::InvalidArgument, "shape has no radial dependence; cannot target a Lipschitz constant");
    gain = *lipschitz * 0.5 * min_slope / shape_slope;
  }
  return std::make_shared<SyntheticCounterterm>(shape, lambda, gain, min_slope, shape_slope);
}

Annulus annulus_around(const FermiRadiusTable& table, double r0, int nr) {
  double lo = *std::min_element(table.radius.begin(), table.radius.end());
  double hi = *std::max_element(table.radius.begin(), table.radius.end());
  return {std::max(lo - 2 * r0, 1e-3), hi + 2 * r0, nr};
}

GridField fock_counterterm(const Dispersion& e, const InteractionPtr& v, double lambda, const FermiRadiusTable& table,
                           const Annulus& grid, QuadratureSettings quad) {
  FockCounterterm m(v, lambda, quad);
  return to_field(m.evaluate(e, table), grid);
}

GridField synthetic_counterterm(const SyntheticCounterterm& model, const Dispersion& e, const FermiRadiusTable& table,
                                const Annulus& grid) {
  return to_field(model.evaluate(e, table), grid);
}

GridField single_scale_counterterm(const Dispersion& e, const InteractionPtr& v, double lambda, int j,
                                   const ScaleCutoff& cutoff, const FermiRadiusTable& table, const Annulus& grid,
                                   QuadratureSettings quad) {
  ScaleResolvedFock m(v, lambda, cutoff, quad);
  return to_field(m.scale(e, table, j), grid);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorCode::InvalidArgument, "need at least two points to fit a slope");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  if (den == 0.0) fail(ErrorCode::InvalidArgument, "degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

ScaleLedger scale_ledger(const ScaleResolvedModel& model, const Dispersion& e, const FermiRadiusTable& table,
                         int j_lo, int j_hi) {
  if (j_hi < j_lo) fail(ErrorCode::InvalidArgument, "empty scale range");
  ScaleLedger led;
  std::vector<double> xs, ys;
  double logM = std::log(model.cutoff().M);
  for (int j = j_lo; j <= j_hi; ++j) {
    GridField f = GridField::ray_constant(model.scale(e, table, j), 1.0, 2.0, 5);
    NormReport rep = ck_norms(f, 2);
    led.j.push_back(j);
    led.k0.push_back(rep.norm[0]);
    led.k1.push_back(rep.norm[1]);
    led.k2.push_back(rep.norm[2]);
    if (rep.norm[0] > 0.0) {
      xs.push_back(j);
      ys.push_back(std::log(rep.norm[0]) / logM);
    }
  }
  led.slope = xs.size() >= 2 ? fit_slope(xs, ys) : 0.0;
  return led;
}

LipschitzReport lipschitz_probe(const CountertermModel& model, const Dispersion& e0, const Dispersion& e1,
                                const Annulus& grid, int m_theta, const std::vector<Bracket>& brackets, double delta,
                                double s3) {
  FermiRadiusTable t0 = trace_surface(e0, m_theta, brackets);
  FermiRadiusTable t1 = trace_surface(e1, m_theta, brackets);
  AngularSamples k0 = model.evaluate(e0, t0), k1 = model.evaluate(e1, t1);
  AngularSamples dk(k0.size());
  for (std::size_t i = 0; i < k0.size(); ++i) dk[i] = k1[i] - k0[i];
  NormReport rk = ck_norms(to_field(dk, grid), 2);
  GridField de = GridField::sample_polar([&](Vec2 p) { return e1.value(p) - e0.value(p); }, grid.r_min, grid.r_max,
                                         grid.nr, m_theta);
  NormReport re = ck_norms(de, 2);
  LipschitzReport rep;
  rep.delta = delta;
  rep.de0 = re.norm[0];
  rep.de1 = re.norm[1];
  rep.de2 = re.norm[2];
  rep.dk0 = rk.norm[0];
  rep.dk1 = rk.norm[1];
  rep.dk2 = rk.norm[2];
  auto quotient = [](double num, double den) { return num == 0.0 ? 0.0 : num / den; };
  rep.q0 = quotient(rep.dk0, rep.de0);
  rep.q1 = quotient(rep.dk1, std::pow(rep.de0, delta) + rep.de1);
  rep.q2 = quotient(rep.dk2, std::pow(rep.de1, delta) + rep.de2 + s3 * rep.de0);
  return rep;
}

namespace {

struct ShellSampler {
  const Dispersion& e;
  double eps;
  double a2, b2;

  ShellSampler(const Dispersion& disp, double width, int m_theta) : e(disp), eps(width) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < m_theta; ++i) {
      double th = angle_of(i, m_theta);
      lo = std::min(lo, radius_at_level(e, -eps, th));
      hi = std::max(hi, radius_at_level(e, eps, th));
    }
    double a = std::max(0.0, 0.98 * lo - 1e-3), b = std::min(1.02 * hi + 1e-3, kPi * std::sqrt(2.0));
    a2 = a * a;
    b2 = b * b;
  }

  template <class Rng>
  Vec2 draw(Rng& rng) const {
    auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (long tries = 0; tries < 10000000; ++tries) {
      double r = std::sqrt(a2 + uniform() * (b2 - a2));
      double th = kTwoPi * uniform();
      Vec2 p = polar_point(r, th);
      if (std::abs(e.value(p)) <= eps) return p;
    }
    fail(ErrorCode::Geometry, "zero samples in shell");
  }
};

}  // namespace

double shell_volume(const Dispersion& e, double eps, int m_theta) {
  if (!(eps > 0.0)) fail(ErrorCode::InvalidArgument, "shell width must be positive");
  double v = 0.0;
  for (int i = 0; i < m_theta; ++i) {
    double th = angle_of(i, m_theta);
    double a = radius_at_level(e, -eps, th), b = radius_at_level(e, eps, th);
    v += 0.5 * (b * b - a * a);
  }
  return v * kTwoPi / m_theta;
}

VolumeEstimate volume_improvement(const Dispersion& e, double eps1, double eps2, double eps3, Vec2 q, int sign1,
                                  int sign2, std::int64_t samples, std::uint64_t seed) {
  if (!(eps1 > 0.0 && eps1 <= eps2 && eps2 <= eps3))
    fail(ErrorCode::InvalidArgument, "shell widths must satisfy 0 < eps1 <= eps2 <= eps3");
  if (samples <= 0) fail(ErrorCode::InvalidArgument, "sample count must be positive");
  if (std::abs(sign1) != 1 || std::abs(sign2) != 1) fail(ErrorCode::InvalidArgument, "signs must be +1 or -1");
  const int m_theta = 1024;
  VolumeEstimate out;
  out.shell1 = shell_volume(e, eps1, m_theta);
  out.shell2 = shell_volume(e, eps2, m_theta);
  ShellSampler s1(e, eps1, m_theta), s2(e, eps2, m_theta);
  std::mt19937_64 rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t n = 0; n < samples; ++n) {
    Vec2 p1 = s1.draw(rng), p2 = s2.draw(rng);
    Vec2 k = static_cast<double>(sign1) * p1 + static_cast<double>(sign2) * p2 + q;
    if (std::abs(e.value(k)) <= eps3) ++hits;
  }
  double p = static_cast<double>(hits) / samples;
  double scale = out.shell1 * out.shell2;
  out.samples = samples;
  out.probability = p;
  out.value = scale * p;
  out.std_error = scale * std::sqrt(p * (1.0 - p) / samples);
  return out;
}

VolumeLadder volume_ladder(const Dispersion& e, double eps1, double eps2, const std::vector<double>& eps3, Vec2 q,
                           int sign1, int sign2, std::int64_t samples, std::uint64_t seed) {
  VolumeLadder lad;
  lad.eps3 = eps3;
  std::vector<double> xs, ys;
  for (double e3 : eps3) {
    VolumeEstimate v = volume_improvement(e, eps1, eps2, e3, q, sign1, sign2, samples, seed);
    lad.estimates.push_back(v);
    if (v.value > 0.0) {
      xs.push_back(std::log(e3));
      ys.push_back(std::log(v.value));
    }
  }
  lad.exponent = xs.size() >= 2 ? fit_slope(xs, ys) : 0.0;
  return lad;
}

}  // namespace fermi
