#include "fermi/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fermi/error.hpp"

namespace fermi {

GridField GridField::polar(double r_min, double r_max, int nr, int m_theta, std::vector<double> values) {
  if (nr < 2 || m_theta < 4 || !(r_max > r_min) || !(r_min >= 0.0))
    fail(ErrorCode::InvalidArgument, "invalid polar grid");
  if (static_cast<std::size_t>(nr) * m_theta != values.size())
    fail(ErrorCode::InvalidArgument, "polar grid size mismatch");
  GridField g;
  g.kind_ = Kind::Polar;
  g.n0_ = nr;
  g.n1_ = m_theta;
  g.a_ = r_min;
  g.b_ = r_max;
  g.values_ = std::move(values);
  for (double v : g.values_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite field value");
  return g;
}

GridField GridField::cartesian(int n, std::vector<double> values) {
  if (n < 4) fail(ErrorCode::InvalidArgument, "invalid Cartesian grid");
  if (static_cast<std::size_t>(n) * n != values.size())
    fail(ErrorCode::InvalidArgument, "Cartesian grid size mismatch");
  GridField g;
  g.kind_ = Kind::Cartesian;
  g.n0_ = g.n1_ = n;
  g.a_ = -kPi;
  g.b_ = kPi;
  g.values_ = std::move(values);
  for (double v : g.values_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite field value");
  return g;
}

GridField GridField::sample_polar(const std::function<double(Vec2)>& f, double r_min, double r_max, int nr,
                                  int m_theta) {
  std::vector<double> v(static_cast<std::size_t>(nr) * m_theta);
  for (int i = 0; i < nr; ++i) {
    double r = r_min + (r_max - r_min) * i / (nr - 1);
    for (int j = 0; j < m_theta; ++j) v[static_cast<std::size_t>(i) * m_theta + j] = f(polar_point(r, angle_of(j, m_theta)));
  }
  return polar(r_min, r_max, nr, m_theta, std::move(v));
}

GridField GridField::sample_polar(const ScalarField& f, double r_min, double r_max, int nr, int m_theta) {
  return sample_polar([&](Vec2 p) { return f.value(p); }, r_min, r_max, nr, m_theta);
}

GridField GridField::sample_cartesian(const std::function<double(Vec2)>& f, int n) {
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  double h = kTwoPi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v[static_cast<std::size_t>(i) * n + j] = f({-kPi + i * h, -kPi + j * h});
  return cartesian(n, std::move(v));
}

GridField GridField::sample_cartesian(const ScalarField& f, int n) {
  return sample_cartesian([&](Vec2 p) { return f.value(p); }, n);
}

GridField GridField::ray_constant(const std::vector<double>& angular, double r_min, double r_max, int nr) {
  int m = static_cast<int>(angular.size());
  std::vector<double> v(static_cast<std::size_t>(nr) * m);
  for (int i = 0; i < nr; ++i) std::copy(angular.begin(), angular.end(), v.begin() + static_cast<std::ptrdiff_t>(i) * m);
  return polar(r_min, r_max, nr, m, std::move(v));
}

double GridField::coord0(int i) const {
  if (kind_ == Kind::Polar) return a_ + (b_ - a_) * i / (n0_ - 1);
  return -kPi + kTwoPi * i / n0_;
}

double GridField::coord1(int j) const {
  if (kind_ == Kind::Polar) return angle_of(j, n1_);
  return -kPi + kTwoPi * j / n1_;
}

double GridField::step0() const { return kind_ == Kind::Polar ? (b_ - a_) / (n0_ - 1) : kTwoPi / n0_; }
double GridField::step1() const { return kTwoPi / n1_; }

Vec2 GridField::point(int i, int j) const {
  if (kind_ == Kind::Polar) return polar_point(coord0(i), coord1(j));
  return {coord0(i), coord1(j)};
}

bool GridField::same_grid(const GridField& o) const {
  return kind_ == o.kind_ && n0_ == o.n0_ && n1_ == o.n1_ && a_ == o.a_ && b_ == o.b_;
}

namespace {

void require_same(const GridField& a, const GridField& b) {
  if (!a.same_grid(b)) fail(ErrorCode::InvalidArgument, "fields live on different grids");
}

}  // namespace

GridField GridField::operator*(const GridField& o) const {
  require_same(*this, o);
  GridField g = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) g.values_[k] *= o.values_[k];
  return g;
}

GridField GridField::operator+(const GridField& o) const {
  require_same(*this, o);
  GridField g = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) g.values_[k] += o.values_[k];
  return g;
}

GridField GridField::operator-(const GridField& o) const {
  require_same(*this, o);
  GridField g = *this;
  for (std::size_t k = 0; k < values_.size(); ++k) g.values_[k] -= o.values_[k];
  return g;
}

GridField GridField::scaled(double s) const {
  GridField g = *this;
  for (double& v : g.values_) v *= s;
  return g;
}

double GridField::sup() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

namespace {

struct Work {
  std::vector<double> v;
  int n0, n1;
  int lo, hi;  // valid rows along axis 0
};

// One central difference (first or second) along an axis.
void difference(Work& w, int axis, bool second, double h, bool periodic0) {
  std::vector<double> out(w.v.size(), 0.0);
  int n0 = w.n0, n1 = w.n1;
  auto idx = [n1](int i, int j) { return static_cast<std::size_t>(i) * n1 + j; };
  if (axis == 1) {
    for (int i = w.lo; i <= w.hi; ++i)
      for (int j = 0; j < n1; ++j) {
        double fp = w.v[idx(i, (j + 1) % n1)], fm = w.v[idx(i, (j + n1 - 1) % n1)];
        out[idx(i, j)] = second ? (fp - 2.0 * w.v[idx(i, j)] + fm) / (h * h) : (fp - fm) / (2.0 * h);
      }
  } else {
    int lo = periodic0 ? 0 : w.lo + 1, hi = periodic0 ? n0 - 1 : w.hi - 1;
    for (int i = lo; i <= hi; ++i) {
      int ip = periodic0 ? (i + 1) % n0 : i + 1, im = periodic0 ? (i + n0 - 1) % n0 : i - 1;
      for (int j = 0; j < n1; ++j) {
        double fp = w.v[idx(ip, j)], fm = w.v[idx(im, j)];
        out[idx(i, j)] = second ? (fp - 2.0 * w.v[idx(i, j)] + fm) / (h * h) : (fp - fm) / (2.0 * h);
      }
    }
    w.lo = lo;
    w.hi = hi;
  }
  w.v = std::move(out);
}

void derivative_along(Work& w, int axis, int order, double h, bool periodic0) {
  if (order % 2 == 1) difference(w, axis, false, h, periodic0);
  for (int k = 0; k < order / 2; ++k) difference(w, axis, true, h, periodic0);
}

}  // namespace

double sup_derivative(const GridField& f, int a, int b) {
  if (f.n0() < 5 || f.n1() < 5) fail(ErrorCode::InvalidArgument, "grid too coarse for the stencil");
  Work w{f.values(), f.n0(), f.n1(), 0, f.n0() - 1};
  derivative_along(w, 0, a, f.step0(), f.periodic0());
  derivative_along(w, 1, b, f.step1(), f.periodic0());
  if (w.lo > w.hi) fail(ErrorCode::InvalidArgument, "grid too coarse for the stencil");
  double s = 0.0;
  for (int i = w.lo; i <= w.hi; ++i)
    for (int j = 0; j < w.n1; ++j) s = std::max(s, std::abs(w.v[static_cast<std::size_t>(i) * w.n1 + j]));
  return s;
}

double seminorm(const GridField& f, int k) {
  double s = 0.0;
  for (int a = 0; a <= k; ++a) s += sup_derivative(f, k - a, a);
  return s;
}

double ck_norm(const GridField& f, int k) {
  double s = 0.0;
  for (int l = 0; l <= k; ++l) s += seminorm(f, l);
  return s;
}

double radial_seminorm(const GridField& f, int q) {
  if (!f.is_polar()) fail(ErrorCode::InvalidArgument, "radial norms need a polar grid");
  double s = 0.0;
  for (int a = 0; a <= q; ++a) s += sup_derivative(f, q - a + 1, a);
  return s;
}

double radial_norm(const GridField& f, int p) {
  if (!f.is_polar()) fail(ErrorCode::InvalidArgument, "radial norms need a polar grid");
  if (p < 1) fail(ErrorCode::InvalidArgument, "radial norm order must be at least 1");
  return ck_norm(f, p - 1) + radial_seminorm(f, p - 1);
}

double angular_norm(const GridField& f, int p) {
  if (!f.is_polar()) fail(ErrorCode::InvalidArgument, "angular norms need a polar grid");
  double s = 0.0;
  for (int l = 0; l <= p; ++l) s += sup_derivative(f, 0, l);
  return s;
}

NormReport ck_norms(const GridField& f, int k_max) {
  if (k_max < 0 || k_max > 3) fail(ErrorCode::InvalidArgument, "k_max must be in 0..3");
  NormReport rep;
  rep.k_max = k_max;
  rep.polar = f.is_polar();
  // cache sup |D^(a,b) F| for a + b <= k_max + 1
  std::map<std::pair<int, int>, double> sups;
  int top = rep.polar ? k_max + 1 : k_max;
  for (int k = 0; k <= top; ++k)
    for (int a = 0; a <= k; ++a) sups[{k - a, a}] = sup_derivative(f, k - a, a);
  double running = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    double s = 0.0;
    for (int a = 0; a <= k; ++a) s += sups[{k - a, a}];
    rep.seminorm[k] = s;
    running += s;
    rep.norm[k] = running;
  }
  if (rep.polar) {
    for (int p = 1; p <= k_max; ++p) {
      double r = 0.0;
      for (int a = 0; a <= p - 1; ++a) r += sups[{p - a, a}];
      rep.radial[p] = rep.norm[p - 1] + r;
    }
    double ang = 0.0;
    for (int p = 0; p <= k_max; ++p) {
      ang += sups[{0, p}];
      rep.angular[p] = ang;
    }
  }
  return rep;
}

namespace {

double interpolate_ray(const GridField& f, int j, double r) {
  int n = f.n0();
  double u = (r - f.r_min()) / f.step0();
  if (u < -1e-9 || u > n - 1 + 1e-9) fail(ErrorCode::Geometry, "Fermi radius outside the field's annulus");
  int i0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, std::max(0, n - 4));
  int m = std::min(4, n);
  double first = f.at(i0, j);
  bool flat = true;
  for (int k = 1; k < m; ++k) flat = flat && f.at(i0 + k, j) == first;
  if (flat) return first;
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    double w = 1.0;
    for (int l = 0; l < m; ++l)
      if (l != k) w *= (u - (i0 + l)) / static_cast<double>(k - l);
    s += w * f.at(i0 + k, j);
  }
  return s;
}

void check_table(const Dispersion& e, const FermiRadiusTable& table) {
  for (int i = 0; i < table.size(); ++i)
    if (std::abs(e.value(table.point(i))) > 1e-9)
      fail(ErrorCode::InvalidArgument, "radius table does not belong to this dispersion");
}

}  // namespace

GridField localize(const Dispersion& e, const GridField& f, const FermiRadiusTable& table) {
  check_table(e, table);
  if (!f.is_polar()) {
    double lo = *std::min_element(table.radius.begin(), table.radius.end());
    double hi = *std::max_element(table.radius.begin(), table.radius.end());
    GridField p = resample_polar(f, std::max(0.0, lo - 0.1), hi + 0.1, 9, table.size());
    return localize(e, p, table);
  }
  if (f.n1() != table.size()) fail(ErrorCode::InvalidArgument, "angular grids differ");
  std::vector<double> ang(table.size());
  for (int j = 0; j < table.size(); ++j) ang[j] = interpolate_ray(f, j, table.radius[j]);
  return GridField::ray_constant(ang, f.r_min(), f.r_max(), f.n0());
}

GridField localize(const Dispersion& e, const std::function<double(Vec2)>& f, const FermiRadiusTable& table,
                   double r_min, double r_max, int nr) {
  check_table(e, table);
  std::vector<double> ang(table.size());
  for (int j = 0; j < table.size(); ++j) ang[j] = f(table.point(j));
  return GridField::ray_constant(ang, r_min, r_max, nr);
}

GridField resample_polar(const GridField& c, double r_min, double r_max, int nr, int m_theta) {
  if (c.is_polar()) fail(ErrorCode::InvalidArgument, "expected a Cartesian field");
  int n = c.n0();
  double h = kTwoPi / n;
  auto bilinear = [&](Vec2 p) {
    Vec2 q = wrap(p);
    double ux = (q.x + kPi) / h, uy = (q.y + kPi) / h;
    int ix = static_cast<int>(std::floor(ux)), iy = static_cast<int>(std::floor(uy));
    double tx = ux - ix, ty = uy - iy;
    int ix1 = (ix + 1) % n, iy1 = (iy + 1) % n;
    ix %= n;
    iy %= n;
    return (1 - tx) * (1 - ty) * c.at(ix, iy) + tx * (1 - ty) * c.at(ix1, iy) + (1 - tx) * ty * c.at(ix, iy1) +
           tx * ty * c.at(ix1, iy1);
  };
  return GridField::sample_polar(bilinear, r_min, r_max, nr, m_theta);
}

Vec2 surface_coordinates(const Dispersion& e, double rho, double theta, Bracket bracket) {
  double r;
  try {
    r = level_radius(e, rho, theta, bracket);
  } catch (const Error&) {
    fail(ErrorCode::InvalidArgument, "level out of range for the bracket");
  }
  return polar_point(r, theta);
}

void write_csv(std::ostream& os, const GridField& f) {
  os << (f.is_polar() ? "r,theta,value\n" : "p1,p2,value\n");
  os << std::setprecision(17);
  for (int i = 0; i < f.n0(); ++i)
    for (int j = 0; j < f.n1(); ++j) os << f.coord0(i) << ',' << f.coord1(j) << ',' << f.at(i, j) << '\n';
}

GridField read_grid_field_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) fail(ErrorCode::Config, "empty grid field file");
  bool polar;
  if (header.rfind("r,theta,value", 0) == 0)
    polar = true;
  else if (header.rfind("p1,p2,value", 0) == 0)
    polar = false;
  else
    fail(ErrorCode::Config, "unrecognised grid field header");
  std::vector<double> c0, vals;
  std::string line;
  int n1 = 0;
  double first0 = 0.0;
  bool started = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b, v;
    if (!(ls >> a >> b >> v)) fail(ErrorCode::Config, "malformed grid field row");
    if (!started) {
      first0 = a;
      started = true;
    }
    if (a == first0) ++n1;
    if (c0.empty() || c0.back() != a) c0.push_back(a);
    vals.push_back(v);
  }
  int n0 = static_cast<int>(c0.size());
  if (polar) return GridField::polar(c0.front(), c0.back(), n0, n1, std::move(vals));
  if (n0 != n1) fail(ErrorCode::Config, "Cartesian grid must be square");
  return GridField::cartesian(n0, std::move(vals));
}

}  // namespace fermi
