#include "fermi/dispersion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "fermi/error.hpp"

namespace fermi {

namespace {

// Degree-7 smootherstep and its first two antiderivatives / derivatives.
double smooth7(double u) { return u * u * u * u * (35.0 + u * (-84.0 + u * (70.0 - 20.0 * u))); }
double smooth7_int1(double u) {
  double u5 = u * u * u * u * u;
  return u5 * (7.0 + u * (-14.0 + u * (10.0 - 2.5 * u)));
}
double smooth7_int2(double u) {
  double u6 = u * u * u * u * u * u;
  return u6 * (7.0 / 6.0 + u * (-2.0 + u * (1.25 - u * 2.5 / 9.0)));
}
double smooth7_d1(double u) { return u * u * u * (140.0 + u * (-420.0 + u * (420.0 - 140.0 * u))); }
double smooth7_d2(double u) { return u * u * (420.0 + u * (-1680.0 + u * (2100.0 - 840.0 * u))); }

}  // namespace

PeriodicQuadratic::PeriodicQuadratic(double A) : A_(A) {
  if (!(A > 0.0 && A < kPi - 0.5)) fail(ErrorCode::InvalidArgument, "quadratic region out of range");
  w_ = 0.4 * (kPi - A);
  c_ = (A + 0.5 * w_) / (kPi - A - 0.5 * w_);
  double y = A + w_;
  f_end_ = 0.5 * y * y - (1.0 + c_) * w_ * w_ * smooth7_int2(1.0);
  df_end_ = y - (1.0 + c_) * w_ * smooth7_int1(1.0);
}

void PeriodicQuadratic::eval(double x, double& f, double& df, double& ddf) const {
  double xw = wrap_coordinate(x);
  double s = xw < 0.0 ? -1.0 : 1.0;
  double y = std::abs(xw);
  if (y <= A_) {
    f = 0.5 * y * y;
    df = y;
    ddf = 1.0;
  } else if (y < A_ + w_) {
    double u = (y - A_) / w_;
    f = 0.5 * y * y - (1.0 + c_) * w_ * w_ * smooth7_int2(u);
    df = y - (1.0 + c_) * w_ * smooth7_int1(u);
    ddf = 1.0 - (1.0 + c_) * smooth7(u);
  } else {
    double z = y - A_ - w_;
    f = f_end_ + df_end_ * z - 0.5 * c_ * z * z;
    df = df_end_ - c_ * z;
    ddf = -c_;
  }
  df *= s;
}

double PeriodicQuadratic::max_value() const {
  double z = kPi - A_ - w_;
  return f_end_ + df_end_ * z - 0.5 * c_ * z * z;
}

SeparableQuadratic::SeparableQuadratic(std::string family, double alpha, double a, double b,
                                       double A1, double A2, Vec2 center, double mu)
    : family_(std::move(family)),
      alpha_(alpha),
      a2_(a * a),
      b2_(b * b),
      phi1_(A1),
      phi2_(A2),
      center_(center),
      mu_(mu) {}

Jet SeparableQuadratic::jet(Vec2 p, int order) const {
  double f1, d1, dd1, f2, d2, dd2;
  phi1_.eval(p.x - center_.x, f1, d1, dd1);
  phi2_.eval(p.y - center_.y, f2, d2, dd2);
  Jet j;
  j.value = 2.0 * alpha_ * (f1 / a2_ + f2 / b2_) - mu_;
  if (order >= 1) j.grad = {2.0 * alpha_ * d1 / a2_, 2.0 * alpha_ * d2 / b2_};
  if (order >= 2) {
    j.hxx = 2.0 * alpha_ * dd1 / a2_;
    j.hyy = 2.0 * alpha_ * dd2 / b2_;
  }
  return j;
}

Jet TightBinding::jet(Vec2 p, int order) const {
  double c1 = std::cos(p.x), c2 = std::cos(p.y);
  Jet j;
  j.value = -2.0 * t_ * (c1 + c2) - mu_;
  if (order >= 1) j.grad = {2.0 * t_ * std::sin(p.x), 2.0 * t_ * std::sin(p.y)};
  if (order >= 2) {
    j.hxx = 2.0 * t_ * c1;
    j.hyy = 2.0 * t_ * c2;
  }
  return j;
}

GridDispersion::GridDispersion(int n, std::vector<double> values, bool symmetric)
    : n_(n), values_(std::move(values)), symmetric_(symmetric) {
  if (n < 8) fail(ErrorCode::InvalidArgument, "grid too small");
  if (static_cast<int>(values_.size()) != n * n) fail(ErrorCode::InvalidArgument, "grid size mismatch");
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite grid value");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 4.0 / 6.0;
    a(i, (i + 1) % n) = 1.0 / 6.0;
    a(i, (i + n - 1) % n) = 1.0 / 6.0;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = values_[i * n + j];
  Eigen::MatrixXd c = lu.solve(s);
  c = lu.solve(c.transpose()).transpose();
  coef_.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) coef_[i * n + j] = c(i, j);
}

namespace {

void bspline_weights(double t, double w[4], double dw[4], double ddw[4]) {
  double t2 = t * t, t3 = t2 * t, omt = 1.0 - t;
  w[0] = omt * omt * omt / 6.0;
  w[1] = (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0;
  w[2] = (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0;
  w[3] = t3 / 6.0;
  dw[0] = -0.5 * omt * omt;
  dw[1] = 1.5 * t2 - 2.0 * t;
  dw[2] = -1.5 * t2 + t + 0.5;
  dw[3] = 0.5 * t2;
  ddw[0] = omt;
  ddw[1] = 3.0 * t - 2.0;
  ddw[2] = -3.0 * t + 1.0;
  ddw[3] = t;
}

}  // namespace

Jet GridDispersion::jet(Vec2 p, int order) const {
  double h = kTwoPi / n_;
  Vec2 q = wrap(p);
  double ux = (q.x + kPi) / h, uy = (q.y + kPi) / h;
  int ix = static_cast<int>(std::floor(ux)), iy = static_cast<int>(std::floor(uy));
  double tx = ux - ix, ty = uy - iy;
  double wx[4], dwx[4], ddwx[4], wy[4], dwy[4], ddwy[4];
  bspline_weights(tx, wx, dwx, ddwx);
  bspline_weights(ty, wy, dwy, ddwy);
  Jet j;
  double gx = 0, gy = 0, hxx = 0, hxy = 0, hyy = 0, v = 0;
  for (int a = 0; a < 4; ++a) {
    int i = ((ix + a - 1) % n_ + n_) % n_;
    for (int b = 0; b < 4; ++b) {
      int k = ((iy + b - 1) % n_ + n_) % n_;
      double c = coef_[i * n_ + k];
      v += c * wx[a] * wy[b];
      if (order >= 1) {
        gx += c * dwx[a] * wy[b];
        gy += c * wx[a] * dwy[b];
      }
      if (order >= 2) {
        hxx += c * ddwx[a] * wy[b];
        hxy += c * dwx[a] * dwy[b];
        hyy += c * wx[a] * ddwy[b];
      }
    }
  }
  j.value = v;
  j.grad = {gx / h, gy / h};
  j.hxx = hxx / (h * h);
  j.hxy = hxy / (h * h);
  j.hyy = hyy / (h * h);
  return j;
}

Jet FiniteDifferenceDispersion::jet(Vec2 p, int order) const {
  Jet j;
  double f0 = base_->value(p);
  j.value = f0;
  if (order == 0) return j;
  double h = h_;
  double fxp = base_->value({p.x + h, p.y}), fxm = base_->value({p.x - h, p.y});
  double fyp = base_->value({p.x, p.y + h}), fym = base_->value({p.x, p.y - h});
  j.grad = {(fxp - fxm) / (2 * h), (fyp - fym) / (2 * h)};
  if (order >= 2) {
    j.hxx = (fxp - 2 * f0 + fxm) / (h * h);
    j.hyy = (fyp - 2 * f0 + fym) / (h * h);
    double fpp = base_->value({p.x + h, p.y + h}), fpm = base_->value({p.x + h, p.y - h});
    double fmp = base_->value({p.x - h, p.y + h}), fmm = base_->value({p.x - h, p.y - h});
    j.hxy = (fpp - fpm - fmp + fmm) / (4 * h * h);
  }
  return j;
}

RadialWindow::RadialWindow(double r_in, double r_out) : r_in_(r_in), r_out_(r_out) {
  if (!(r_in > 0.0 && r_out > r_in && r_out < kPi))
    fail(ErrorCode::InvalidArgument, "window annulus out of range");
  // wide ramps keep the window's own derivatives small
  d_in_ = std::min(0.8, 0.75 * r_in);
  d_out_ = std::min(0.8, 0.5 * (kPi - r_out));
}

void RadialWindow::eval(double r, double& w, double& dw, double& ddw) const {
  w = dw = ddw = 0.0;
  if (r <= r_in_ - d_in_ || r >= r_out_ + d_out_) return;
  if (r < r_in_) {
    double u = (r - r_in_ + d_in_) / d_in_;
    w = smooth7(u);
    dw = smooth7_d1(u) / d_in_;
    ddw = smooth7_d2(u) / (d_in_ * d_in_);
  } else if (r <= r_out_) {
    w = 1.0;
  } else {
    double u = (r_out_ + d_out_ - r) / d_out_;
    w = smooth7(u);
    dw = -smooth7_d1(u) / d_out_;
    ddw = smooth7_d2(u) / (d_out_ * d_out_);
  }
}

AngularSeries::AngularSeries(const std::vector<double>& samples) : samples_(samples) {
  int m = static_cast<int>(samples.size());
  if (m < 4) fail(ErrorCode::InvalidArgument, "too few angular samples");
  int kmax = m / 2;
  a_.assign(kmax + 1, 0.0);
  b_.assign(kmax + 1, 0.0);
  for (int k = 0; k <= kmax; ++k) {
    double sa = 0, sb = 0;
    for (int i = 0; i < m; ++i) {
      // exact phase reduction keeps the transform accurate for large k
      int idx = static_cast<int>((static_cast<long long>(k) * i) % m);
      double ph = kTwoPi * idx / m;
      sa += samples[i] * std::cos(ph);
      sb += samples[i] * std::sin(ph);
    }
    double scale = (k == 0 || (m % 2 == 0 && k == kmax)) ? 1.0 / m : 2.0 / m;
    a_[k] = sa * scale;
    b_[k] = (m % 2 == 0 && k == kmax) ? 0.0 : sb * scale;
  }
}

void AngularSeries::eval(double theta, double& f, double& df, double& ddf) const {
  f = a_.empty() ? 0.0 : a_[0];
  df = ddf = 0.0;
  std::complex<double> z1(std::cos(theta), std::sin(theta)), z = 1.0;
  for (std::size_t k = 1; k < a_.size(); ++k) {
    z *= z1;
    double c = z.real(), s = z.imag(), kk = static_cast<double>(k);
    f += a_[k] * c + b_[k] * s;
    df += kk * (-a_[k] * s + b_[k] * c);
    ddf -= kk * kk * (a_[k] * c + b_[k] * s);
  }
}

double AngularSeries::operator()(double theta) const {
  double f, df, ddf;
  eval(theta, f, df, ddf);
  return f;
}

bool AngularSeries::symmetric_under_pi() const {
  double scale = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) scale = std::max({scale, std::abs(a_[k]), std::abs(b_[k])});
  for (std::size_t k = 1; k < a_.size(); k += 2)
    if (std::abs(a_[k]) > 1e-12 * (1.0 + scale) || std::abs(b_[k]) > 1e-12 * (1.0 + scale)) return false;
  return true;
}

Jet WindowedAngularField::jet(Vec2 p, int order) const {
  Jet j;
  Vec2 q = wrap(p);
  double r = norm(q);
  double w, dw, ddw;
  window_.eval(r, w, dw, ddw);
  if (w == 0.0 && dw == 0.0 && ddw == 0.0) return j;
  double th = std::atan2(q.y, q.x);
  double k, dk, ddk;
  series_.eval(th, k, dk, ddk);
  j.value = w * k;
  if (order == 0) return j;
  double c = q.x / r, s = q.y / r;
  double fr = dw * k, ft = w * dk;
  j.grad = {c * fr - s * ft / r, s * fr + c * ft / r};
  if (order >= 2) {
    double frr = ddw * k, frt = dw * dk, ftt = w * ddk;
    double r2 = r * r;
    j.hxx = frr * c * c + fr / r * s * s - 2 * frt * s * c / r + 2 * ft * s * c / r2 + ftt * s * s / r2;
    j.hyy = frr * s * s + fr / r * c * c + 2 * frt * s * c / r - 2 * ft * s * c / r2 + ftt * c * c / r2;
    j.hxy = frr * s * c - fr / r * s * c + frt * (c * c - s * s) / r - ft * (c * c - s * s) / r2 -
            ftt * s * c / r2;
  }
  return j;
}

Jet TrigPolynomial::jet(Vec2 p, int order) const {
  Jet j;
  for (const auto& t : terms_) {
    double arg = t.m1 * p.x + t.m2 * p.y;
    double c = std::cos(arg), s = std::sin(arg);
    double f = t.cos_coef * c + t.sin_coef * s;
    j.value += f;
    if (order >= 1) {
      double d = -t.cos_coef * s + t.sin_coef * c;
      j.grad.x += d * t.m1;
      j.grad.y += d * t.m2;
    }
    if (order >= 2) {
      j.hxx -= f * t.m1 * t.m1;
      j.hxy -= f * t.m1 * t.m2;
      j.hyy -= f * t.m2 * t.m2;
    }
  }
  return j;
}

double TrigPolynomial::norm_bound(int k) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double amp = std::abs(t.cos_coef) + std::abs(t.sin_coef);
    double m = std::abs(t.m1) + std::abs(t.m2), pw = 1.0;
    for (int l = 0; l <= k; ++l) {
      total += amp * pw;
      pw *= m;
    }
  }
  return total;
}

Jet PerturbedDispersion::jet(Vec2 p, int order) const {
  Jet a = base_->jet(p, order);
  Jet b = delta_->jet(p, order);
  a.value += scale_ * b.value;
  a.grad = a.grad + scale_ * b.grad;
  a.hxx += scale_ * b.hxx;
  a.hxy += scale_ * b.hxy;
  a.hyy += scale_ * b.hyy;
  return a;
}

namespace {

constexpr double kWrappedQuadraticRegion = 1.2;

DispersionPtr make_ellipse(const std::string& family, double a, double b, Vec2 center) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorCode::InvalidArgument, "semi-axes must be positive");
  double cap = kPi - 0.9;
  double A1 = std::min(1.25 * a, cap), A2 = std::min(1.25 * b, cap);
  if (a >= A1 || b >= A2) fail(ErrorCode::InvalidArgument, "ellipse does not fit in the cell");
  return std::make_shared<SeparableQuadratic>(family, 1.0, a, b, A1, A2, center, 1.0);
}

}  // namespace

DispersionPtr make_dispersion(const std::string& family, const std::vector<double>& params) {
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      fail(ErrorCode::InvalidArgument, "wrong parameter count for family " + family);
  };
  if (family == "wrapped-quadratic") {
    need(1, 1);
    double mu = params[0];
    PeriodicQuadratic phi(kWrappedQuadraticRegion);
    if (!(mu > 0.0)) fail(ErrorCode::InvalidArgument, "empty Fermi sea (mu <= 0)");
    if (mu >= 2.0 * phi.max_value()) fail(ErrorCode::InvalidArgument, "full Fermi sea");
    if (std::sqrt(2.0 * mu) >= kWrappedQuadraticRegion)
      fail(ErrorCode::InvalidArgument, "Fermi surface leaves the quadratic region");
    return std::make_shared<SeparableQuadratic>(family, 0.5, 1.0, 1.0, kWrappedQuadraticRegion,
                                                kWrappedQuadraticRegion, Vec2{}, mu);
  }
  if (family == "tight-binding") {
    need(2, 2);
    double t = params[0], mu = params[1];
    if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "hopping must be positive");
    if (mu <= -4.0 * t) fail(ErrorCode::InvalidArgument, "empty Fermi sea");
    if (mu >= 4.0 * t) fail(ErrorCode::InvalidArgument, "full Fermi sea");
    return std::make_shared<TightBinding>(t, mu);
  }
  if (family == "ellipse") {
    need(2, 4);
    Vec2 c{params.size() > 2 ? params[2] : 0.0, params.size() > 3 ? params[3] : 0.0};
    return make_ellipse(family, params[0], params[1], c);
  }
  if (family == "circle") {
    need(1, 3);
    Vec2 c{params.size() > 1 ? params[1] : 0.0, params.size() > 2 ? params[2] : 0.0};
    return make_ellipse(family, params[0], params[0], c);
  }
  fail(ErrorCode::InvalidArgument, "unknown dispersion family: " + family);
}

DispersionPtr make_grid_dispersion(int n, std::vector<double> values, bool symmetric) {
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (lo >= 0.0) fail(ErrorCode::InvalidArgument, "empty Fermi sea");
  if (hi <= 0.0) fail(ErrorCode::InvalidArgument, "full Fermi sea");
  return std::make_shared<GridDispersion>(n, std::move(values), symmetric);
}

DispersionPtr sample_to_grid(const Dispersion& e, int n) {
  std::vector<double> v(static_cast<std::size_t>(n) * n);
  double h = kTwoPi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v[i * n + j] = e.value({-kPi + i * h, -kPi + j * h});
  return make_grid_dispersion(n, std::move(v), e.symmetric());
}

Jet evaluate_jet(const Dispersion& e, Vec2 p, int order) {
  if (order < 0 || order > 2) fail(ErrorCode::InvalidArgument, "jet order must be 0, 1 or 2");
  return e.jet(wrap(p), order);
}

double sampled_c2_norm(const ScalarField& e, int n) {
  double s0 = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  double h = kTwoPi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Jet q = e.jet({-kPi + i * h, -kPi + j * h}, 2);
      s0 = std::max(s0, std::abs(q.value));
      sx = std::max(sx, std::abs(q.grad.x));
      sy = std::max(sy, std::abs(q.grad.y));
      sxx = std::max(sxx, std::abs(q.hxx));
      sxy = std::max(sxy, std::abs(q.hxy));
      syy = std::max(syy, std::abs(q.hyy));
    }
  return s0 + sx + sy + sxx + sxy + syy;
}

}  // namespace fermi
