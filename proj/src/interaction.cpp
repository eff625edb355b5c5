#include "fermi/interaction.hpp"

#include <algorithm>
#include <cmath>

#include "fermi/error.hpp"

namespace fermi {

InteractionPtr Interaction::constant(double c) {
  return InteractionPtr(new Interaction(Shape::Constant, c, 0.0, 0.0));
}

InteractionPtr Interaction::cosine(double amplitude) {
  return InteractionPtr(new Interaction(Shape::Cosine, amplitude, 0.0, 0.0));
}

InteractionPtr Interaction::decaying(Shape base, double base_amplitude, double alpha, double w_amplitude) {
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "decay exponent must be positive");
  return InteractionPtr(new Interaction(base, base_amplitude, alpha, w_amplitude));
}

InteractionPtr Interaction::scaled(double s) const {
  return InteractionPtr(new Interaction(shape_, s * amplitude_, alpha_, s * w_amplitude_));
}

double Interaction::instantaneous(Vec2 p) const {
  if (shape_ == Shape::Constant) return amplitude_;
  return amplitude_ * (std::cos(p.x) + std::cos(p.y));
}

double Interaction::value(double p0, Vec2 p) const {
  double v = instantaneous(p);
  if (w_amplitude_ != 0.0)
    v += std::pow(1.0 + p0 * p0, -0.5 * alpha_) * w_amplitude_ * std::cos(p.x) * std::cos(p.y);
  return v;
}

std::string Interaction::family() const {
  std::string base = shape_ == Shape::Constant ? "constant" : "cosine";
  return is_instantaneous() ? base : base + "+decaying";
}

namespace {

constexpr int kProbeGrid = 64;
const double kProbeFrequencies[] = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0};

// sup over the probe set of the sum over multi-indices (p0,p1,p2) of order <= 2
// of |D^alpha f|, by central differences.
template <class F>
double sampled_c2(const F& f) {
  const double h = kTwoPi / kProbeGrid;
  const double h0 = 1e-3;
  double sup[10] = {0};
  for (double p0 : kProbeFrequencies)
    for (int i = 0; i < kProbeGrid; ++i)
      for (int j = 0; j < kProbeGrid; ++j) {
        double x = -kPi + i * h, y = -kPi + j * h;
        auto v = [&](double a, double b, double c) { return f(p0 + a, Vec2{x + b, y + c}); };
        double f0 = v(0, 0, 0);
        double d[10];
        d[0] = f0;
        d[1] = (v(h0, 0, 0) - v(-h0, 0, 0)) / (2 * h0);
        d[2] = (v(0, h, 0) - v(0, -h, 0)) / (2 * h);
        d[3] = (v(0, 0, h) - v(0, 0, -h)) / (2 * h);
        d[4] = (v(h0, 0, 0) - 2 * f0 + v(-h0, 0, 0)) / (h0 * h0);
        d[5] = (v(0, h, 0) - 2 * f0 + v(0, -h, 0)) / (h * h);
        d[6] = (v(0, 0, h) - 2 * f0 + v(0, 0, -h)) / (h * h);
        d[7] = (v(h0, h, 0) - v(h0, -h, 0) - v(-h0, h, 0) + v(-h0, -h, 0)) / (4 * h0 * h);
        d[8] = (v(h0, 0, h) - v(h0, 0, -h) - v(-h0, 0, h) + v(-h0, 0, -h)) / (4 * h0 * h);
        d[9] = (v(0, h, h) - v(0, h, -h) - v(0, -h, h) + v(0, -h, -h)) / (4 * h * h);
        for (int k = 0; k < 10; ++k) sup[k] = std::max(sup[k], std::abs(d[k]));
      }
  double total = 0.0;
  for (double s : sup) total += s;
  return total;
}

}  // namespace

InteractionReport check_interaction(const Interaction& v) {
  InteractionReport rep;
  rep.c2_norm = sampled_c2([&](double p0, Vec2 p) { return v.value(p0, p); });
  rep.bounded = rep.c2_norm <= 1.0 + 1e-9;
  const double h = kTwoPi / kProbeGrid;
  for (double p0 : kProbeFrequencies)
    for (int i = 0; i < kProbeGrid; ++i)
      for (int j = 0; j < kProbeGrid; ++j) {
        Vec2 p{-kPi + i * h + 0.1, -kPi + j * h + 0.05};
        double a = v.value(p0, p);
        // vhat is real, so the conjugate is the value itself
        rep.reflection_defect = std::max(rep.reflection_defect, std::abs(v.value(-p0, p) - a));
        rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(v.value(p0, Vec2{-p.x, -p.y}) - a));
      }
  rep.reflection = rep.reflection_defect <= 1e-12;
  rep.symmetric = rep.symmetry_defect <= 1e-12;
  if (v.is_instantaneous()) {
    rep.decay = true;
    return rep;
  }
  const double freqs[] = {10.0, 100.0, 1000.0};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  bool finite = true;
  for (double p0 : freqs) {
    double d = 0.0;
    for (int i = 0; i < kProbeGrid; ++i)
      for (int j = 0; j < kProbeGrid; ++j) {
        Vec2 p{-kPi + i * h, -kPi + j * h};
        d = std::max(d, std::abs(v.value(p0, p) - v.instantaneous(p)));
      }
    if (!(d > 0.0)) {
      finite = false;
      break;
    }
    double x = std::log(p0), y = std::log(d);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (finite) {
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.fitted_alpha = -slope;
    rep.decay = -slope > 0.0;
  }
  return rep;
}

double interaction_distance(const Interaction& v, const Interaction& w) {
  return sampled_c2([&](double p0, Vec2 p) { return v.value(p0, p) - w.value(p0, p); });
}

}  // namespace fermi
