#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fermi/counterterm.hpp"

namespace fermi {

struct SolverConfig {
  ModelPtr model;  // carries the coupling lambda
  ClassParams params;
  double epsilon = 0.1;       // ball radius for |e - E|_2
  double r0 = 0.1;            // annulus r_F(E) -/+ 2 r0
  double radial_ball = 0.9;   // guard band for |e - E|_{3,r} < 1
  int max_iterations = 60;
  double tolerance = 1e-10;   // on |f_n|_{3,r}
  int m_theta = 256;
  int nr = 33;
  double G3 = 1e3;            // reject E with |E|_{3,r} above this
  int divergence_steps = 3;
  bool check_iterates = true;
  int norm_grid = 256;

  double lambda() const { return model ? model->coupling() : 0.0; }
};

struct StepRecord {
  int n = 0;
  double f0 = 0.0, f1 = 0.0, f3r = 0.0;  // norms of f_n = e_n - e_{n-1}
  double residual = 0.0;                 // |e_n + K(e_n) - E|_0
  double ball2 = 0.0, ball3r = 0.0;      // |e_n - E|_2, |e_n - E|_{3,r}
  bool class_ok = true;
  bool ball_ok = true;
};

struct IterationTrace {
  std::vector<StepRecord> steps;
  double ratio0 = 0.0, ratio1 = 0.0, ratio3r = 0.0;  // fitted geometric ratios for n >= 2
  double reconstruction_error = 0.0;                 // max |e_n - (E + sum f_k)| on the grid
};

enum class SolveStatus { Converged, MaxIterations, Divergence, BallExit, ClassFailure, TraceFailure };
std::string to_string(SolveStatus s);

struct InversionResult {
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;
  DispersionPtr solution;
  AngularSamples correction;  // k with e = E - W k on the annulus
  FermiRadiusTable table;     // surface of the solution
  Annulus annulus;
  IterationTrace trace;
  double residual = 0.0;
  double displacement2 = 0.0;   // |e - E|_2
  double displacement3r = 0.0;  // |e - E|_{3,r}
  double D = 0.0;               // sup |K(e_n)|_{3,r} / |lambda| over the iterates
  double Q = 0.0;               // sup |f_{n+1}|_0 / (|f_n|_0 |lambda|)
  std::optional<double> lipschitz;  // model constant, if known
  bool contraction_guard = true;    // Q |lambda| < min{1, eps} with the model constant
  bool converged() const { return status == SolveStatus::Converged; }
};

// Iterates e_{n+1} = E - K(e_n), starting from e_0 = E + W * initial_shift (if given).
InversionResult invert(const DispersionPtr& E, const SolverConfig& config,
                       const AngularSamples* initial_shift = nullptr);

// The iterate E - W k on the annulus of the reference table.
DispersionPtr corrected_dispersion(const DispersionPtr& E, const Annulus& annulus, const AngularSamples& k,
                                   double sign = -1.0);

struct RateConstants {
  double Q = 0.0, delta = 0.0, lambda = 0.0;
  double B_R = 0.0, C_R = 0.0;
  double x() const { return Q * std::abs(lambda); }
};

RateConstants make_rate_constants(double Q, double delta, double lambda);

struct RateReport {
  double slope0 = 0.0, slope1 = 0.0, slope3r = 0.0;  // fitted slopes against n, n delta, n delta^2
  double log_x = 0.0;
  double prefactor = 1.0;
  bool envelope0 = false, envelope1 = false, envelope3r = false;
};

RateReport rate_check(const IterationTrace& trace, const RateConstants& constants);

double uniqueness_probe(const DispersionPtr& E, const SolverConfig& config, const AngularSamples& perturbation);

struct ContinuityReport {
  double dE0 = 0.0, dE1 = 0.0, dE2 = 0.0, dV2 = 0.0;
  double d0 = 0.0, d1 = 0.0, d2 = 0.0;
  double d2_half = 0.0;
  double delta = 0.0;
  double holder_envelope = 0.0;
  double line_bound = 0.0;  // 2 |E - E'|_0 + |V - V'|_2
  bool within_line_bound = false;
  bool monotone = false;
};

// E' = E + W * shift, V' = s V.
ContinuityReport continuity_probe(const DispersionPtr& E, const AngularSamples& shift, double interaction_scale,
                                  const SolverConfig& config, double delta);

}  // namespace fermi
