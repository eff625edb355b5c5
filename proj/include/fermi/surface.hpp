#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fermi/dispersion.hpp"

namespace fermi {

struct ClassParams {
  double delta0 = 0.1;
  double g0 = 0.5;
  double G0 = 10.0;
  double omega0 = 0.5;

  void validate() const;
  // The relaxed class E_s(delta0/2, g0/2, 2 G0, omega0/2).
  ClassParams relaxed() const { return {delta0 / 2, g0 / 2, 2 * G0, omega0 / 2}; }
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct FermiRadiusTable {
  std::vector<double> theta;
  std::vector<double> radius;
  std::vector<double> r_under;
  std::vector<double> r_over;

  int size() const { return static_cast<int>(theta.size()); }
  Vec2 point(int i) const { return polar_point(radius[i], theta[i]); }
};

inline double angle_of(int i, int m) { return kTwoPi * i / m; }

// Default bracket: from 0.05 to just inside the boundary of the cell along the ray.
Bracket default_bracket(double theta);

double fermi_radius(const Dispersion& e, double theta, Bracket bracket);

// Same rootfinder for the level set e = rho.
double level_radius(const Dispersion& e, double rho, double theta, Bracket bracket);

// brackets may be empty (defaults) or hold one bracket per angle.
FermiRadiusTable trace_surface(const Dispersion& e, int m_theta, const std::vector<Bracket>& brackets = {});

// Brackets r_F(reference) -/+ 2 r0.
std::vector<Bracket> annulus_brackets(const FermiRadiusTable& reference, double r0);

struct ClassReport {
  double margin_half_cell = 0.0;  // min d(S, dF_2) - delta0
  double margin_gradient = 0.0;   // min |grad E| - g0
  double margin_c2 = 0.0;         // G0 - |E|_2
  double margin_curvature = 0.0;  // min (t, E'' t) - omega0
  double c2_norm = 0.0;
  int traced = 0;
  int trace_failures = 0;
  std::string first_failure;
  bool verdict = false;
};

inline constexpr double kClassGuardBand = 1e-3;

// Angles where the ray misses the surface are counted as failures; the margins
// are computed on the samples that could be traced.
ClassReport check_class(const Dispersion& e, const ClassParams& params, int m_theta,
                        const std::vector<Bracket>& brackets = {}, int norm_grid = 256);

double curvature_form(const Dispersion& e, Vec2 p);  // (t, E'' t)
double curvature(const Dispersion& e, Vec2 p);

struct ConvexCenterReport {
  Vec2 c1, c2, center;
  double min_distance = 0.0, max_distance = 0.0;
  double min_cos_angle = 0.0;
  double k_min = 0.0, k_max = 0.0;
  double slack = 0.0;
  bool radius_bounds = false;
  bool angle_bound = false;
  bool symmetric_center = true;  // only meaningful for symmetric dispersions
};

ConvexCenterReport convex_center(const FermiRadiusTable& table, const Dispersion& e);

std::vector<Vec2> offset_surface(const FermiRadiusTable& table, const Dispersion& e, double L);

struct RadialConstants {
  double g1 = 0.0;
  double r0 = 0.0;
  double eps_max = 0.0;
};

RadialConstants derive_radial_constants(const ClassParams& params);

// Minimum of the radial derivative of e over r_F(reference) -/+ 2 r0, nr points per ray.
double min_radial_derivative(const Dispersion& e, const FermiRadiusTable& reference, double r0, int nr = 9);

}  // namespace fermi
