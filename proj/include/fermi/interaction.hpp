#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fermi/torus.hpp"

namespace fermi {

// vhat(p0, p) = vtilde(p) + (1 + p0^2)^(-alpha/2) w(p); real valued.
class Interaction {
 public:
  enum class Shape { Constant, Cosine };

  static std::shared_ptr<const Interaction> constant(double c);
  static std::shared_ptr<const Interaction> cosine(double amplitude);
  // Adds the decaying part w(p) = w_amplitude * cos(p1) cos(p2).
  static std::shared_ptr<const Interaction> decaying(Shape base, double base_amplitude, double alpha,
                                                     double w_amplitude);

  double instantaneous(Vec2 p) const;  // vtilde(p)
  double value(double p0, Vec2 p) const;
  bool is_instantaneous() const { return w_amplitude_ == 0.0; }
  std::string family() const;
  double alpha() const { return alpha_; }
  // The same interaction multiplied by s.
  std::shared_ptr<const Interaction> scaled(double s) const;

 private:
  Interaction(Shape shape, double amplitude, double alpha, double w_amplitude)
      : shape_(shape), amplitude_(amplitude), alpha_(alpha), w_amplitude_(w_amplitude) {}
  Shape shape_;
  double amplitude_;
  double alpha_;
  double w_amplitude_;
};

using InteractionPtr = std::shared_ptr<const Interaction>;

struct InteractionReport {
  double c2_norm = 0.0;               // |vhat|_2 sampled
  bool bounded = false;               // (i)
  double reflection_defect = 0.0;     // max |vhat(-p0,p) - conj vhat(p0,p)|
  bool reflection = false;            // (ii)
  double symmetry_defect = 0.0;       // max |vhat(p0,-p) - vhat(p0,p)|
  bool symmetric = false;             // (iii)
  std::optional<double> fitted_alpha;  // (iv); empty for instantaneous families
  bool decay = false;                 // (iv)
  bool all() const { return bounded && reflection && symmetric && decay; }
};

InteractionReport check_interaction(const Interaction& v);

// Sampled |v - v'|_2 over the same probe set used by check_interaction.
double interaction_distance(const Interaction& v, const Interaction& w);

}  // namespace fermi
