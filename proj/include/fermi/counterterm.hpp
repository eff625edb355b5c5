#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fermi/dispersion.hpp"
#include "fermi/grid_field.hpp"
#include "fermi/interaction.hpp"
#include "fermi/surface.hpp"

namespace fermi {

// Spin multiplicity of the direct (Hartree) term and weight of the exchange term
// in the first-order self-energy.
inline constexpr double kHartreeSpinWeight = 2.0;
inline constexpr double kExchangeWeight = 1.0;

using AngularSamples = std::vector<double>;

struct ScaleCutoff {
  double M = 2.0;
  int j_min = -14;

  // a(x): 1 on [0, 1/M^2], 0 on [1, inf), C-infinity in between.
  double profile(double x) const;
  // chi_j as a function of |i p0 - e|, for j <= 0.
  double chi(int j, double x) const;
  // h(eps) + sgn(eps)/2, where h is the p0-integral of a((p0^2+eps^2))/(i p0 - eps) / (2 pi).
  double smooth_part(double eps) const;
  // p0-integrated single-scale occupation n_j(e); j = 1 is the ultraviolet remainder.
  double occupation(int j, double e) const;
  void validate() const;
};

struct QuadratureSettings {
  int sea_order = 32;    // Gauss-Legendre nodes in r inside the Fermi sea
  int shell_order = 16;  // nodes per sub-interval of a scale shell
};

class CountertermModel {
 public:
  virtual ~CountertermModel() = default;
  virtual std::string kind() const = 0;
  virtual double coupling() const = 0;
  virtual std::shared_ptr<const CountertermModel> with_coupling(double lambda) const = 0;
  // K(e) on S_e at the table angles.
  virtual AngularSamples evaluate(const Dispersion& e, const FermiRadiusTable& table) const = 0;
  // Known constant L with |K(e1) - K(e0)|_0 <= L |lambda| |e1 - e0|_0.
  virtual std::optional<double> lipschitz_constant() const { return std::nullopt; }
  // The same model with the interaction multiplied by s, and the sampled |v|_2 it uses.
  virtual std::shared_ptr<const CountertermModel> with_interaction_scale(double s) const = 0;
  virtual double interaction_norm() const = 0;
};

using ModelPtr = std::shared_ptr<const CountertermModel>;

class ScaleResolvedModel : public CountertermModel {
 public:
  virtual AngularSamples scale(const Dispersion& e, const FermiRadiusTable& table, int j) const = 0;
  virtual const ScaleCutoff& cutoff() const = 0;
};

class FockCounterterm : public CountertermModel {
 public:
  FockCounterterm(InteractionPtr v, double lambda, QuadratureSettings quad = {});
  std::string kind() const override { return "fock"; }
  double coupling() const override { return lambda_; }
  ModelPtr with_coupling(double lambda) const override;
  AngularSamples evaluate(const Dispersion& e, const FermiRadiusTable& table) const override;
  ModelPtr with_interaction_scale(double s) const override;
  double interaction_norm() const override;
  const InteractionPtr& interaction() const { return v_; }

 private:
  InteractionPtr v_;
  double lambda_;
  QuadratureSettings quad_;
};

class ScaleResolvedFock : public ScaleResolvedModel {
 public:
  ScaleResolvedFock(InteractionPtr v, double lambda, ScaleCutoff cutoff, QuadratureSettings quad = {});
  std::string kind() const override { return "scale-resolved"; }
  double coupling() const override { return lambda_; }
  ModelPtr with_coupling(double lambda) const override;
  // Sum over j_min..1.
  AngularSamples evaluate(const Dispersion& e, const FermiRadiusTable& table) const override;
  AngularSamples scale(const Dispersion& e, const FermiRadiusTable& table, int j) const override;
  const ScaleCutoff& cutoff() const override { return cutoff_; }
  ModelPtr with_interaction_scale(double s) const override;
  double interaction_norm() const override;

 private:
  InteractionPtr v_;
  double lambda_;
  ScaleCutoff cutoff_;
  QuadratureSettings quad_;
};

// K_j = lambda * value for every scale; no decay.
class FlatScaleModel : public ScaleResolvedModel {
 public:
  FlatScaleModel(double lambda, double value, ScaleCutoff cutoff) : lambda_(lambda), value_(value), cutoff_(cutoff) {}
  std::string kind() const override { return "flat-scale"; }
  double coupling() const override { return lambda_; }
  ModelPtr with_coupling(double lambda) const override;
  AngularSamples evaluate(const Dispersion& e, const FermiRadiusTable& table) const override;
  AngularSamples scale(const Dispersion& e, const FermiRadiusTable& table, int j) const override;
  const ScaleCutoff& cutoff() const override { return cutoff_; }
  ModelPtr with_interaction_scale(double s) const override;
  double interaction_norm() const override { return std::abs(value_); }

 private:
  double lambda_, value_;
  ScaleCutoff cutoff_;
};

// K(e)(theta) = lambda * gain * shape(p_F(e, theta)).
// Shapes: "one", "cos" = -(cos p1 + cos p2)/6, "radius" = |p|.
class SyntheticCounterterm : public CountertermModel {
 public:
  // min_slope: lower bound of the radial derivative of the reference dispersion on the annulus;
  // shape_slope: sup of the radial derivative of the shape there.
  SyntheticCounterterm(std::string shape, double lambda, double gain, double min_slope, double shape_slope);
  std::string kind() const override { return "synthetic"; }
  double coupling() const override { return lambda_; }
  ModelPtr with_coupling(double lambda) const override;
  AngularSamples evaluate(const Dispersion& e, const FermiRadiusTable& table) const override;
  std::optional<double> lipschitz_constant() const override;
  ModelPtr with_interaction_scale(double s) const override;
  double interaction_norm() const override { return std::abs(gain_); }
  double gain() const { return gain_; }
  static double shape_value(const std::string& shape, Vec2 p);

 private:
  std::string shape_;
  double lambda_, gain_, min_slope_, shape_slope_;
};

// Builds the synthetic model for the annulus r_F(E) -/+ 2 r0 around the reference surface.
// If lipschitz is set, the gain is chosen so that lipschitz_constant() equals it.
std::shared_ptr<const SyntheticCounterterm> make_synthetic(const std::string& shape, double lambda, double gain,
                                                           std::optional<double> lipschitz, const Dispersion& E,
                                                           const FermiRadiusTable& reference, double r0);

struct Annulus {
  double r_min = 0.0;
  double r_max = 0.0;
  int nr = 17;
};

// Annulus r_F -/+ 2 r0 (outer envelope over angles).
Annulus annulus_around(const FermiRadiusTable& table, double r0, int nr = 17);

GridField fock_counterterm(const Dispersion& e, const InteractionPtr& v, double lambda, const FermiRadiusTable& table,
                           const Annulus& grid, QuadratureSettings quad = {});
GridField synthetic_counterterm(const SyntheticCounterterm& model, const Dispersion& e, const FermiRadiusTable& table,
                                const Annulus& grid);
GridField single_scale_counterterm(const Dispersion& e, const InteractionPtr& v, double lambda, int j,
                                   const ScaleCutoff& cutoff, const FermiRadiusTable& table, const Annulus& grid,
                                   QuadratureSettings quad = {});

struct ScaleLedger {
  std::vector<int> j;
  std::vector<double> k0, k1, k2;
  double slope = 0.0;  // least-squares slope of log_M |K_j|_0 against j
};

ScaleLedger scale_ledger(const ScaleResolvedModel& model, const Dispersion& e, const FermiRadiusTable& table,
                         int j_lo, int j_hi);

double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct LipschitzReport {
  double de0 = 0.0, de1 = 0.0, de2 = 0.0;
  double dk0 = 0.0, dk1 = 0.0, dk2 = 0.0;
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;
  double delta = 0.0;
};

LipschitzReport lipschitz_probe(const CountertermModel& model, const Dispersion& e0, const Dispersion& e1,
                                const Annulus& grid, int m_theta, const std::vector<Bracket>& brackets,
                                double delta, double s3 = 1.0);

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double shell1 = 0.0, shell2 = 0.0;
  double probability = 0.0;
  std::int64_t samples = 0;
};

// |U(e, eps)| = |{p : |e(p)| <= eps}| from the polar level radii.
double shell_volume(const Dispersion& e, double eps, int m_theta = 1024);

VolumeEstimate volume_improvement(const Dispersion& e, double eps1, double eps2, double eps3, Vec2 q, int sign1,
                                  int sign2, std::int64_t samples, std::uint64_t seed);

struct VolumeLadder {
  std::vector<double> eps3;
  std::vector<VolumeEstimate> estimates;
  double exponent = 0.0;  // fitted 2 gamma
};

VolumeLadder volume_ladder(const Dispersion& e, double eps1, double eps2, const std::vector<double>& eps3, Vec2 q,
                           int sign1, int sign2, std::int64_t samples, std::uint64_t seed);

}  // namespace fermi
