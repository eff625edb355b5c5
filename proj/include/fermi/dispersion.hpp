#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fermi/torus.hpp"

namespace fermi {

struct Jet {
  double value = 0.0;
  Vec2 grad;
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;
};

class ScalarField {
 public:
  virtual ~ScalarField() = default;
  // order 0 fills value only, 1 adds the gradient, 2 adds the Hessian.
  virtual Jet jet(Vec2 p, int order) const = 0;
  double value(Vec2 p) const { return jet(p, 0).value; }
};

class Dispersion : public ScalarField {
 public:
  virtual std::string family() const = 0;
  virtual bool symmetric() const = 0;
};

using DispersionPtr = std::shared_ptr<const Dispersion>;
using FieldPtr = std::shared_ptr<const ScalarField>;

// Smooth, even, 2pi-periodic function equal to x^2/2 on |x| <= A.
class PeriodicQuadratic {
 public:
  explicit PeriodicQuadratic(double A);
  double A() const { return A_; }
  // Returns phi, phi', phi'' at x.
  void eval(double x, double& f, double& df, double& ddf) const;
  double max_value() const;

 private:
  double A_, w_, c_;
  double f_end_, df_end_;
};

// e(p) = 2 alpha [phi1(p1-c1)/a^2 + phi2(p2-c2)/b^2] - mu
class SeparableQuadratic : public Dispersion {
 public:
  SeparableQuadratic(std::string family, double alpha, double a, double b, double A1, double A2,
                     Vec2 center, double mu);
  Jet jet(Vec2 p, int order) const override;
  std::string family() const override { return family_; }
  bool symmetric() const override { return center_.x == 0.0 && center_.y == 0.0; }

 private:
  std::string family_;
  double alpha_, a2_, b2_;
  PeriodicQuadratic phi1_, phi2_;
  Vec2 center_;
  double mu_;
};

class TightBinding : public Dispersion {
 public:
  TightBinding(double t, double mu) : t_(t), mu_(mu) {}
  Jet jet(Vec2 p, int order) const override;
  std::string family() const override { return "tight-binding"; }
  bool symmetric() const override { return true; }

 private:
  double t_, mu_;
};

// Periodic tensor-product cubic B-spline through samples on the N x N grid
// p = (-pi + 2 pi i/N, -pi + 2 pi j/N), values stored row-major in i.
class GridDispersion : public Dispersion {
 public:
  GridDispersion(int n, std::vector<double> values, bool symmetric);
  Jet jet(Vec2 p, int order) const override;
  std::string family() const override { return "grid-sampled"; }
  bool symmetric() const override { return symmetric_; }
  int size() const { return n_; }
  const std::vector<double>& samples() const { return values_; }

 private:
  int n_;
  std::vector<double> values_;
  std::vector<double> coef_;
  bool symmetric_;
};

// Replaces the jets of a base dispersion by central differences with step h.
class FiniteDifferenceDispersion : public Dispersion {
 public:
  FiniteDifferenceDispersion(DispersionPtr base, double h) : base_(std::move(base)), h_(h) {}
  Jet jet(Vec2 p, int order) const override;
  std::string family() const override { return base_->family(); }
  bool symmetric() const override { return base_->symmetric(); }

 private:
  DispersionPtr base_;
  double h_;
};

// Smootherstep radial window: 1 on [r_in, r_out], 0 outside [r_in - d, r_out + d].
class RadialWindow {
 public:
  RadialWindow(double r_in, double r_out);
  void eval(double r, double& w, double& dw, double& ddw) const;
  double inner() const { return r_in_; }
  double outer() const { return r_out_; }
  double inner_ramp() const { return d_in_; }
  double outer_ramp() const { return d_out_; }

 private:
  double r_in_, r_out_, d_in_, d_out_;
};

// Trigonometric interpolant of equispaced samples on [0, 2pi).
class AngularSeries {
 public:
  AngularSeries() = default;
  explicit AngularSeries(const std::vector<double>& samples);
  void eval(double theta, double& f, double& df, double& ddf) const;
  double operator()(double theta) const;
  const std::vector<double>& samples() const { return samples_; }
  bool symmetric_under_pi() const;

 private:
  std::vector<double> samples_;
  std::vector<double> a_, b_;
};

// W(|p|) k(theta(p)); supported inside the cell.
class WindowedAngularField : public ScalarField {
 public:
  WindowedAngularField(RadialWindow window, AngularSeries series)
      : window_(window), series_(std::move(series)) {}
  Jet jet(Vec2 p, int order) const override;
  const AngularSeries& series() const { return series_; }
  const RadialWindow& window() const { return window_; }

 private:
  RadialWindow window_;
  AngularSeries series_;
};

struct TrigTerm {
  int m1 = 0, m2 = 0;
  double cos_coef = 0.0, sin_coef = 0.0;
};

// Sum of a_m cos(m.p) + b_m sin(m.p) over integer vectors m.
class TrigPolynomial : public ScalarField {
 public:
  explicit TrigPolynomial(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}
  Jet jet(Vec2 p, int order) const override;
  // Upper bound for |f|_k computed from the coefficients.
  double norm_bound(int k) const;
  const std::vector<TrigTerm>& terms() const { return terms_; }

 private:
  std::vector<TrigTerm> terms_;
};

// base + scale * delta
class PerturbedDispersion : public Dispersion {
 public:
  PerturbedDispersion(DispersionPtr base, FieldPtr delta, double scale, bool symmetric)
      : base_(std::move(base)), delta_(std::move(delta)), scale_(scale), symmetric_(symmetric) {}
  Jet jet(Vec2 p, int order) const override;
  std::string family() const override { return base_->family() + "+perturbation"; }
  bool symmetric() const override { return symmetric_; }
  const DispersionPtr& base() const { return base_; }
  const FieldPtr& delta() const { return delta_; }
  double scale() const { return scale_; }

 private:
  DispersionPtr base_;
  FieldPtr delta_;
  double scale_;
  bool symmetric_;
};

// Built-in families: "wrapped-quadratic" {mu}, "tight-binding" {t, mu},
// "ellipse" {a, b[, c1, c2]} for the level set p1^2/a^2 + p2^2/b^2 - 1,
// "circle" {radius[, c1, c2]}.
DispersionPtr make_dispersion(const std::string& family, const std::vector<double>& params);
DispersionPtr make_grid_dispersion(int n, std::vector<double> values, bool symmetric);
DispersionPtr sample_to_grid(const Dispersion& e, int n);

Jet evaluate_jet(const Dispersion& e, Vec2 p, int order);

// Sup over the n x n torus grid of |e| + |de| + |d2e| (sum over multi-indices).
double sampled_c2_norm(const ScalarField& e, int n);

}  // namespace fermi
