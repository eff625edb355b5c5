#include "fermi/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fermi/error.hpp"

namespace fermi {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max-iterations";
    case SolveStatus::Divergence: return "divergence";
    case SolveStatus::BallExit: return "ball-exit";
    case SolveStatus::ClassFailure: return "class-failure";
    case SolveStatus::TraceFailure: return "trace-failure";
  }
  return "unknown";
}

DispersionPtr corrected_dispersion(const DispersionPtr& E, const Annulus& annulus, const AngularSamples& k,
                                   double sign) {
  AngularSeries series(k);
  auto field = std::make_shared<WindowedAngularField>(RadialWindow(annulus.r_min, annulus.r_max), series);
  bool sym = E->symmetric() && series.symmetric_under_pi();
  return std::make_shared<PerturbedDispersion>(E, field, sign, sym);
}

namespace {

struct AngularNorms {
  double n0, n1, n2, n3r;
};

AngularNorms angular_norms(const AngularSamples& k) {
  GridField f = GridField::ray_constant(k, 1.0, 2.0, 5);
  NormReport r = ck_norms(f, 3);
  return {r.norm[0], r.norm[1], r.norm[2], r.radial[3]};
}

AngularSamples difference(const AngularSamples& a, const AngularSamples& b) {
  AngularSamples d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double fitted_ratio(const std::vector<std::pair<int, double>>& pts) {
  std::vector<double> xs, ys;
  for (auto [n, v] : pts)
    if (n >= 2 && v > 1e-14) {
      xs.push_back(n);
      ys.push_back(std::log(v));
    }
  if (xs.size() < 2) return 0.0;
  return std::exp(fit_slope(xs, ys));
}

}  // namespace

InversionResult invert(const DispersionPtr& E, const SolverConfig& cfg, const AngularSamples* initial_shift) {
  if (!cfg.model) fail(ErrorCode::InvalidArgument, "solver needs a counterterm model");
  if (cfg.max_iterations < 1) fail(ErrorCode::InvalidArgument, "max_iterations must be positive");
  ClassReport cls = check_class(*E, cfg.params, cfg.m_theta, {}, cfg.norm_grid);
  if (!cls.verdict) fail(ErrorCode::CheckFailed, "starting dispersion is not in the class");
  FermiRadiusTable tE = trace_surface(*E, cfg.m_theta);
  std::vector<Bracket> brackets = annulus_brackets(tE, cfg.r0);
  InversionResult res;
  res.annulus = annulus_around(tE, cfg.r0, cfg.nr);
  GridField Egrid = GridField::sample_polar(*E, res.annulus.r_min, res.annulus.r_max, cfg.nr, cfg.m_theta);
  if (radial_norm(Egrid, 3) > cfg.G3) fail(ErrorCode::CheckFailed, "|E|_{3,r} exceeds the configured G3");

  double lambda = cfg.lambda();
  res.lipschitz = cfg.model->lipschitz_constant();
  if (res.lipschitz) res.contraction_guard = *res.lipschitz * std::abs(lambda) < std::min(1.0, cfg.epsilon);

  const int m = cfg.m_theta;
  AngularSamples kprev(m, 0.0), kbefore(m, 0.0);
  bool shifted = false;
  if (initial_shift) {
    if (static_cast<int>(initial_shift->size()) != m) fail(ErrorCode::InvalidArgument, "shift size mismatch");
    for (int i = 0; i < m; ++i) kprev[i] = -(*initial_shift)[i];
    shifted = true;
  }
  std::vector<double> accumulated = Egrid.values();
  double max_recon = 0.0;
  int increases = 0;
  double last_residual = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, double>> t0, t1, t3;
  DispersionPtr en = shifted ? corrected_dispersion(E, res.annulus, kprev) : E;

  for (int n = 0;; ++n) {
    StepRecord rec;
    rec.n = n;
    AngularSamples f = difference(kbefore, kprev);  // f_n = -(k_{n-1} - k_{n-2})
    AngularNorms fn = angular_norms(f);
    rec.f0 = fn.n0;
    rec.f1 = fn.n1;
    rec.f3r = fn.n3r;
    for (int i = 0; i < cfg.nr; ++i)
      for (int j = 0; j < m; ++j) accumulated[static_cast<std::size_t>(i) * m + j] += f[j];
    // the iterate on the grid is E - k_{n-1}; compare with the running sum
    for (int i = 0; i < cfg.nr; ++i)
      for (int j = 0; j < m; ++j) {
        double direct = Egrid.at(i, j) - kprev[j];
        max_recon = std::max(max_recon, std::abs(accumulated[static_cast<std::size_t>(i) * m + j] - direct));
      }
    AngularSamples disp(m);
    for (int j = 0; j < m; ++j) disp[j] = -kprev[j];
    AngularNorms dn = angular_norms(disp);
    rec.ball2 = dn.n2;
    rec.ball3r = dn.n3r;
    rec.ball_ok = rec.ball2 < cfg.epsilon && rec.ball3r < cfg.radial_ball;
    if (n >= 1) {
      t0.push_back({n, rec.f0});
      t1.push_back({n, rec.f1});
      t3.push_back({n, rec.f3r});
    }

    if (!rec.ball_ok) {
      rec.class_ok = false;
      res.trace.steps.push_back(rec);
      res.status = SolveStatus::BallExit;
      res.message = "iterate left the ball at step " + std::to_string(n);
      break;
    }
    FermiRadiusTable tn;
    try {
      tn = trace_surface(*en, m, brackets);
    } catch (const Error& err) {
      res.trace.steps.push_back(rec);
      res.status = SolveStatus::TraceFailure;
      res.message = err.what();
      break;
    }
    if (cfg.check_iterates && (n > 0 || shifted)) {
      ClassReport c;
      try {
        c = check_class(*en, cfg.params.relaxed(), m, brackets, cfg.norm_grid);
      } catch (const Error&) {
        c.verdict = false;
      }
      rec.class_ok = c.verdict;
      if (!rec.class_ok) {
        res.trace.steps.push_back(rec);
        res.status = SolveStatus::ClassFailure;
        res.message = "iterate left the relaxed class at step " + std::to_string(n);
        break;
      }
    }
    AngularSamples kn = cfg.model->evaluate(*en, tn);
    AngularSamples next = difference(kprev, kn);  // f_{n+1}
    AngularNorms nx = angular_norms(next);
    rec.residual = nx.n0;
    res.trace.steps.push_back(rec);
    if (lambda != 0.0) res.D = std::max(res.D, angular_norms(kn).n3r / std::abs(lambda));
    if (n >= 1 && rec.f0 > 1e-14 && lambda != 0.0) res.Q = std::max(res.Q, nx.n0 / rec.f0 / std::abs(lambda));

    if (rec.residual > last_residual) {
      if (++increases >= cfg.divergence_steps) {
        res.status = SolveStatus::Divergence;
        res.message = "residual increased for " + std::to_string(increases) + " consecutive steps";
        break;
      }
    } else {
      increases = 0;
    }
    last_residual = rec.residual;

    if (nx.n3r < cfg.tolerance) {
      res.status = SolveStatus::Converged;
      res.solution = en;
      res.correction = kprev;
      res.table = tn;
      res.residual = rec.residual;
      res.displacement2 = dn.n2;
      res.displacement3r = dn.n3r;
      t0.push_back({n + 1, nx.n0});
      t1.push_back({n + 1, nx.n1});
      t3.push_back({n + 1, nx.n3r});
      break;
    }
    if (n + 1 > cfg.max_iterations) {
      res.status = SolveStatus::MaxIterations;
      res.message = "iteration limit reached";
      break;
    }
    kbefore = kprev;
    kprev = kn;
    en = corrected_dispersion(E, res.annulus, kprev);
  }
  res.trace.ratio0 = fitted_ratio(t0);
  res.trace.ratio1 = fitted_ratio(t1);
  res.trace.ratio3r = fitted_ratio(t3);
  res.trace.reconstruction_error = max_recon;
  if (!res.solution) {
    res.solution = en;
    res.correction = kprev;
  }
  return res;
}

RateConstants make_rate_constants(double Q, double delta, double lambda) {
  RateConstants c;
  c.Q = Q;
  c.delta = delta;
  c.lambda = lambda;
  double x = c.x();
  if (!(x > 0.0 && x < 1.0)) fail(ErrorCode::InvalidArgument, "rate constants need 0 < Q|lambda| < 1");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  double a = std::pow(x, 1.0 - delta), b = std::pow(x, 1.0 - delta * delta);
  c.B_R = a / (1.0 - a);
  c.C_R = b / (1.0 - b);
  return c;
}

RateReport rate_check(const IterationTrace& trace, const RateConstants& c) {
  std::vector<const StepRecord*> rows;
  for (const auto& s : trace.steps)
    if (s.n >= 1 && s.f0 > 0.0) rows.push_back(&s);
  if (rows.size() < 4) fail(ErrorCode::InvalidArgument, "degenerate trace: fewer than four nonzero increments");
  RateReport rep;
  double x = c.x();
  rep.log_x = std::log(x);
  std::vector<double> n0, n1, n3, y0, y1, y3;
  for (const auto* s : rows) {
    n0.push_back(s->n);
    n1.push_back(s->n * c.delta);
    n3.push_back(s->n * c.delta * c.delta);
    y0.push_back(std::log(s->f0));
    y1.push_back(std::log(std::max(s->f1, 1e-300)));
    y3.push_back(std::log(std::max(s->f3r, 1e-300)));
  }
  rep.slope0 = fit_slope(n0, y0);
  rep.slope1 = fit_slope(n1, y1);
  rep.slope3r = fit_slope(n3, y3);
  auto env0 = [&](int n) { return std::pow(x, n); };
  auto env1 = [&](int n) { return c.B_R * std::pow(x, n * c.delta); };
  auto env3 = [&](int n) { return c.C_R * std::max(std::pow(c.B_R, c.delta), 1.0) * std::pow(x, n * c.delta * c.delta); };
  // each envelope is scaled so that it matches the first increment
  const StepRecord& first = *rows.front();
  double a0 = std::max(1.0, first.f0 / env0(first.n));
  double a1 = std::max(1.0, first.f1 / env1(first.n));
  double a3 = std::max(1.0, first.f3r / env3(first.n));
  rep.prefactor = a0;
  rep.envelope0 = rep.envelope1 = rep.envelope3r = true;
  for (const auto* s : rows) {
    rep.envelope0 = rep.envelope0 && s->f0 <= a0 * env0(s->n) * (1 + 1e-9);
    rep.envelope1 = rep.envelope1 && s->f1 <= a1 * env1(s->n) * (1 + 1e-9);
    rep.envelope3r = rep.envelope3r && s->f3r <= a3 * env3(s->n) * (1 + 1e-9);
  }
  return rep;
}

double uniqueness_probe(const DispersionPtr& E, const SolverConfig& config, const AngularSamples& perturbation) {
  if (static_cast<int>(perturbation.size()) != config.m_theta)
    fail(ErrorCode::InvalidArgument, "perturbation size mismatch");
  AngularNorms pn = angular_norms(perturbation);
  if (!(pn.n2 < config.epsilon && pn.n3r < config.radial_ball))
    fail(ErrorCode::InvalidArgument, "perturbation leaves the ball");
  InversionResult a = invert(E, config);
  InversionResult b = invert(E, config, &perturbation);
  if (!a.converged() || !b.converged()) fail(ErrorCode::Divergence, "an inversion run failed to converge");
  double d = 0.0;
  for (std::size_t i = 0; i < a.correction.size(); ++i) d = std::max(d, std::abs(a.correction[i] - b.correction[i]));
  return d;
}

ContinuityReport continuity_probe(const DispersionPtr& E, const AngularSamples& shift, double s,
                                  const SolverConfig& config, double delta) {
  if (static_cast<int>(shift.size()) != config.m_theta) fail(ErrorCode::InvalidArgument, "shift size mismatch");
  FermiRadiusTable tE = trace_surface(*E, config.m_theta);
  Annulus ann = annulus_around(tE, config.r0, config.nr);
  AngularSamples half(shift.size());
  for (std::size_t i = 0; i < shift.size(); ++i) half[i] = 0.5 * shift[i];
  DispersionPtr Ep = corrected_dispersion(E, ann, shift, 1.0);
  DispersionPtr Eh = corrected_dispersion(E, ann, half, 1.0);
  SolverConfig cp = config, ch = config;
  cp.model = config.model->with_interaction_scale(s);
  ch.model = config.model->with_interaction_scale(0.5 * (1.0 + s));
  InversionResult r = invert(E, config), rp = invert(Ep, cp), rh = invert(Eh, ch);
  if (!r.converged() || !rp.converged() || !rh.converged()) fail(ErrorCode::Divergence, "an inversion run failed to converge");
  ContinuityReport rep;
  rep.delta = delta;
  AngularNorms dE = angular_norms(shift);
  rep.dE0 = dE.n0;
  rep.dE1 = dE.n1;
  rep.dE2 = dE.n2;
  rep.dV2 = std::abs(1.0 - s) * config.model->interaction_norm();
  // e - e' = W (k' - k - shift) on the annulus
  auto gap = [&](const InversionResult& other, const AngularSamples& sh) {
    AngularSamples d(shift.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = other.correction[i] - r.correction[i] - sh[i];
    return angular_norms(d);
  };
  AngularNorms d = gap(rp, shift), dh = gap(rh, half);
  rep.d0 = d.n0;
  rep.d1 = d.n1;
  rep.d2 = d.n2;
  rep.d2_half = dh.n2;
  rep.holder_envelope = 4.0 * (rep.dE2 + std::pow(rep.dE1, delta) + std::pow(rep.dE0, delta * delta) +
                               std::pow(rep.dV2, delta * delta));
  rep.line_bound = 2.0 * rep.dE0 + rep.dV2;
  rep.within_line_bound = rep.d0 <= rep.line_bound + 1e-12;
  rep.monotone = rep.d2_half <= rep.d2 + 1e-12;
  return rep;
}

}  // namespace fermi
