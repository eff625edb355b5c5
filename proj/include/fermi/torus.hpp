#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fermi {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline Vec2 polar_point(double r, double theta) {
  return {r * std::cos(theta), r * std::sin(theta)};
}

// Maps a coordinate into [-pi, pi).
inline double wrap_coordinate(double x) {
  double y = std::fmod(x + kPi, kTwoPi);
  if (y < 0.0) y += kTwoPi;
  return y - kPi;
}

inline Vec2 wrap(Vec2 p) { return {wrap_coordinate(p.x), wrap_coordinate(p.y)}; }

// The fundamental cell F = (-pi,pi)^2 and the half cell F_2 = (-pi/2,pi/2)^2.
struct BrillouinTorus {
  static constexpr double cell_half_width = kPi;
  static constexpr double half_cell_half_width = kPi / 2.0;

  static bool in_cell(Vec2 p) {
    return std::abs(p.x) < cell_half_width && std::abs(p.y) < cell_half_width;
  }
  static bool in_half_cell(Vec2 p) {
    return std::abs(p.x) < half_cell_half_width && std::abs(p.y) < half_cell_half_width;
  }
  // Signed distance to the boundary of F_2 (positive inside).
  static double half_cell_margin(Vec2 p) {
    return half_cell_half_width - std::max(std::abs(p.x), std::abs(p.y));
  }
  // Length of the ray from the origin at angle theta until it meets the boundary of F.
  static double ray_to_cell_boundary(double theta) {
    return cell_half_width / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
  }
  static double ray_to_half_cell_boundary(double theta) {
    return half_cell_half_width / std::max(std::abs(std::cos(theta)), std::abs(std::sin(theta)));
  }
};

}  // namespace fermi
