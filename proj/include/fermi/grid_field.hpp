#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fermi/dispersion.hpp"
#include "fermi/surface.hpp"

namespace fermi {

// Values on a polar grid r_j x theta_i over an annulus (axis 0 = r, axis 1 = theta),
// or on the periodic Cartesian torus grid (axis 0 = p1, axis 1 = p2).
class GridField {
 public:
  enum class Kind { Polar, Cartesian };

  GridField() = default;
  static GridField polar(double r_min, double r_max, int nr, int m_theta, std::vector<double> values);
  static GridField cartesian(int n, std::vector<double> values);
  static GridField sample_polar(const std::function<double(Vec2)>& f, double r_min, double r_max, int nr,
                                int m_theta);
  static GridField sample_polar(const ScalarField& f, double r_min, double r_max, int nr, int m_theta);
  static GridField sample_cartesian(const std::function<double(Vec2)>& f, int n);
  static GridField sample_cartesian(const ScalarField& f, int n);
  // Field that depends on theta only.
  static GridField ray_constant(const std::vector<double>& angular, double r_min, double r_max, int nr);

  Kind kind() const { return kind_; }
  bool is_polar() const { return kind_ == Kind::Polar; }
  int n0() const { return n0_; }
  int n1() const { return n1_; }
  double coord0(int i) const;
  double coord1(int j) const;
  double step0() const;
  double step1() const;
  double r_min() const { return a_; }
  double r_max() const { return b_; }
  bool periodic0() const { return kind_ == Kind::Cartesian; }
  Vec2 point(int i, int j) const;
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * n1_ + j]; }
  double& at(int i, int j) { return values_[static_cast<std::size_t>(i) * n1_ + j]; }
  const std::vector<double>& values() const { return values_; }
  bool same_grid(const GridField& o) const;

  GridField operator*(const GridField& o) const;
  GridField operator+(const GridField& o) const;
  GridField operator-(const GridField& o) const;
  GridField scaled(double s) const;
  double sup() const;

 private:
  Kind kind_ = Kind::Cartesian;
  int n0_ = 0, n1_ = 0;
  double a_ = 0.0, b_ = 0.0;
  std::vector<double> values_;
};

// D^(a,b) F by central differences; sup over nodes where the stencil fits.
double sup_derivative(const GridField& f, int a, int b);

struct NormReport {
  int k_max = 0;
  bool polar = false;
  std::array<double, 5> seminorm{};  // ||F||_k
  std::array<double, 5> norm{};      // |F|_k
  std::array<double, 5> radial{};    // |F|_{p,r}, p = 1..k_max (polar only)
  std::array<double, 5> angular{};   // |F|_{p,theta} (polar only)
};

NormReport ck_norms(const GridField& f, int k_max);
double seminorm(const GridField& f, int k);
double ck_norm(const GridField& f, int k);
double radial_seminorm(const GridField& f, int q);  // ||d_r F||_q
double radial_norm(const GridField& f, int p);      // |F|_{p,r}
double angular_norm(const GridField& f, int p);     // |F|_{p,theta}

// (l_e F)(r, theta_i) = F(r_F(theta_i), theta_i), constant along rays.
GridField localize(const Dispersion& e, const GridField& f, const FermiRadiusTable& table);
GridField localize(const Dispersion& e, const std::function<double(Vec2)>& f, const FermiRadiusTable& table,
                   double r_min, double r_max, int nr);
GridField resample_polar(const GridField& cartesian, double r_min, double r_max, int nr, int m_theta);

Vec2 surface_coordinates(const Dispersion& e, double rho, double theta, Bracket bracket);

void write_csv(std::ostream& os, const GridField& f);
GridField read_grid_field_csv(std::istream& is);

}  // namespace fermi
