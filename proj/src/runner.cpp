#include "fermi/runner.hpp"

#include <json.hpp>
#include <random>
#include <sstream>

#include "fermi/error.hpp"
#include "fermi/graph.hpp"

namespace fermi {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return kExitOk;
    case ErrorCode::CheckFailed: return kExitCheckFailed;
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument: return kExitConfig;
    case ErrorCode::Geometry: return kExitGeometry;
    case ErrorCode::Divergence: return kExitDivergence;
    case ErrorCode::Internal: return kExitInternal;
  }
  return kExitInternal;
}

namespace {

class Csv {
 public:
  explicit Csv(const std::string& header) {
    out_.precision(17);
    out_ << header << "\n";
  }
  template <typename... T>
  void row(const T&... v) {
    int i = 0;
    ((out_ << (i++ ? "," : "") << v), ...);
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

Artifact json_artifact(const std::string& name, const json& j) { return {name, j.dump(2) + "\n"}; }

json class_json(const ClassReport& r, const ClassParams& p) {
  return {{"verdict", r.verdict},
          {"traced", r.traced},
          {"trace_failures", r.trace_failures},
          {"first_failure", r.first_failure},
          {"c2_norm", r.c2_norm},
          {"margins",
           {{"half_cell", r.margin_half_cell},
            {"gradient", r.margin_gradient},
            {"c2", r.margin_c2},
            {"curvature", r.margin_curvature}}},
          {"params", {{"delta0", p.delta0}, {"g0", p.g0}, {"G0", p.G0}, {"omega0", p.omega0}}}};
}

AngularSamples cosine_mode(int m, double amplitude, int mode) {
  AngularSamples s(m);
  for (int i = 0; i < m; ++i) s[i] = amplitude * std::cos(mode * angle_of(i, m));
  return s;
}

std::uint64_t seed_for(const Config& c, const std::string& section, const RunOptions& o) {
  return o.seed ? *o.seed : c.unsigned_integer(section, "seed", 20240601);
}

}  // namespace

RunResult run_check_class(const Config& c) {
  DispersionPtr e = build_dispersion(c);
  ClassParams p = build_class_params(c);
  int m = c.integer("class", "m_theta", 256);
  ClassReport r = check_class(*e, p, m, {}, c.integer("class", "norm_grid", 256));
  RunResult res;
  res.artifacts.push_back(json_artifact("class_report.json", class_json(r, p)));
  if (r.trace_failures > 0) {
    res.exit_code = kExitGeometry;
    res.message = "surface tracing failed: " + r.first_failure;
  } else {
    res.exit_code = r.verdict ? kExitOk : kExitCheckFailed;
    res.message = r.verdict ? "dispersion is in the class" : "dispersion is not in the class";
  }
  return res;
}

RunResult run_trace_surface(const Config& c) {
  DispersionPtr e = build_dispersion(c);
  int m = c.integer("class", "m_theta", 256);
  FermiRadiusTable t = trace_surface(*e, m);
  Csv csv("index,theta,radius,p1,p2,curvature");
  double kmin = 1e300, kmax = -1e300;
  for (int i = 0; i < t.size(); ++i) {
    Vec2 p = t.point(i);
    double k = curvature(*e, p);
    kmin = std::min(kmin, k);
    kmax = std::max(kmax, k);
    csv.row(i, t.theta[i], t.radius[i], p.x, p.y, k);
  }
  RunResult res;
  res.artifacts.push_back({"surface.csv", csv.str()});
  double rmin = *std::min_element(t.radius.begin(), t.radius.end());
  double rmax = *std::max_element(t.radius.begin(), t.radius.end());
  res.artifacts.push_back(json_artifact(
      "surface.json",
      {{"m_theta", m}, {"radius_min", rmin}, {"radius_max", rmax}, {"curvature_min", kmin}, {"curvature_max", kmax}}));
  res.message = "traced " + std::to_string(m) + " angles";
  return res;
}

RunResult run_invert(const Config& c) {
  DispersionPtr E = build_dispersion(c);
  SolverConfig s = build_solver(c, E);
  InversionResult r = invert(E, s);
  Csv trace("n,f0,f1,f3r,residual,ball2,ball3r,class_ok,ball_ok");
  for (const auto& st : r.trace.steps)
    trace.row(st.n, st.f0, st.f1, st.f3r, st.residual, st.ball2, st.ball3r, int(st.class_ok), int(st.ball_ok));
  RunResult res;
  res.artifacts.push_back({"trace.csv", trace.str()});
  double lambda = s.lambda();
  json summary = {{"status", to_string(r.status)},
                  {"message", r.message},
                  {"model", s.model->kind()},
                  {"lambda", lambda},
                  {"iterations", r.trace.steps.size()},
                  {"residual", r.residual},
                  {"ratio0", r.trace.ratio0},
                  {"ratio1", r.trace.ratio1},
                  {"ratio3r", r.trace.ratio3r},
                  {"reconstruction_error", r.trace.reconstruction_error},
                  {"D", r.D},
                  {"Q", r.Q},
                  {"contraction_guard", r.contraction_guard},
                  {"lipschitz", r.lipschitz ? json(*r.lipschitz) : json(nullptr)}};
  if (r.converged()) {
    summary["displacement2"] = r.displacement2;
    summary["displacement3r"] = r.displacement3r;
    summary["displacement2_over_lambda"] = lambda != 0.0 ? json(r.displacement2 / std::abs(lambda)) : json(nullptr);
    Csv sol("index,theta,radius,p1,p2,correction");
    for (int i = 0; i < r.table.size(); ++i) {
      Vec2 p = r.table.point(i);
      sol.row(i, r.table.theta[i], r.table.radius[i], p.x, p.y, r.correction[i]);
    }
    res.artifacts.push_back({"solution.csv", sol.str()});
    json rates = nullptr;
    if (lambda != 0.0 && r.Q > 0.0) {
      try {
        RateReport rr = rate_check(r.trace, make_rate_constants(r.Q, c.number("solver", "delta", 0.5), lambda));
        rates = {{"slope0", rr.slope0},   {"slope1", rr.slope1},       {"slope3r", rr.slope3r},
                 {"log_x", rr.log_x},     {"envelope0", rr.envelope0}, {"envelope1", rr.envelope1},
                 {"envelope3r", rr.envelope3r}};
      } catch (const Error& err) {
        rates = {{"skipped", err.what()}};
      }
    }
    summary["rates"] = rates;
  }
  res.artifacts.push_back(json_artifact("summary.json", summary));
  res.exit_code = r.converged() ? kExitOk : kExitDivergence;
  res.message = r.converged() ? "converged after " + std::to_string(r.trace.steps.size()) + " steps"
                              : to_string(r.status) + ": " + r.message;
  return res;
}

RunResult run_scale_ledger(const Config& c) {
  DispersionPtr E = build_dispersion(c);
  ModelPtr m = build_model(c, E);
  auto sm = std::dynamic_pointer_cast<const ScaleResolvedModel>(m);
  if (!sm) fail(ErrorCode::Config, "scale-ledger needs a scale-resolved or flat-scale model");
  FermiRadiusTable t = trace_surface(*E, c.integer("solver", "m_theta", 256));
  ScaleLedger led = scale_ledger(*sm, *E, t, c.integer("counterterm", "j_lo", -10), c.integer("counterterm", "j_hi", -1));
  Csv csv("j,k0,k1,k2");
  for (std::size_t i = 0; i < led.j.size(); ++i) csv.row(led.j[i], led.k0[i], led.k1[i], led.k2[i]);
  RunResult res;
  res.artifacts.push_back({"ledger.csv", csv.str()});
  res.artifacts.push_back(json_artifact(
      "ledger.json", {{"slope", led.slope}, {"M", sm->cutoff().M}, {"model", m->kind()}, {"lambda", m->coupling()}}));
  res.message = "fitted slope " + std::to_string(led.slope);
  return res;
}

RunResult run_lipschitz_probe(const Config& c, const RunOptions& o) {
  DispersionPtr E = build_dispersion(c);
  SolverConfig s = build_solver(c, E);
  int pairs = c.integer("probe", "pairs", 50);
  double amin = c.number("probe", "amplitude_min", 1e-4), amax = c.number("probe", "amplitude_max", 1e-1);
  double delta = c.number("probe", "delta", 0.5), s3 = c.number("probe", "s3", 1.0);
  if (pairs < 2 || !(amin > 0 && amax > amin)) fail(ErrorCode::Config, "invalid probe settings");
  FermiRadiusTable tE = trace_surface(*E, s.m_theta);
  Annulus ann = annulus_around(tE, s.r0, s.nr);
  auto brackets = annulus_brackets(tE, s.r0);
  std::mt19937_64 rng(seed_for(c, "probe", o));
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  Csv csv("pair,amplitude,de0,de1,de2,dk0,dk1,dk2,q0,q1,q2");
  double qmin = 1e300, qmax = 0.0;
  DispersionPtr first;
  for (int i = 0; i < pairs; ++i) {
    double amp = amin * std::pow(amax / amin, double(i) / (pairs - 1));
    double a[4], b[4];
    for (int k = 0; k < 4; ++k) {
      a[k] = coeff(rng);
      b[k] = coeff(rng);
    }
    AngularSamples shape(s.m_theta);
    double sup = 0.0;
    for (int j = 0; j < s.m_theta; ++j) {
      // positive mean plus bounded random low modes: the shape stays above 0.2
      double th = angle_of(j, s.m_theta), v = 1.0 + 0.1 * a[0];
      for (int k = 1; k < 4; ++k) v += 0.25 * (a[k] * std::cos(k * th) + b[k] * std::sin(k * th)) / (k * k);
      shape[j] = v;
      sup = std::max(sup, std::abs(v));
    }
    for (auto& v : shape) v *= amp / sup;
    DispersionPtr e1 = corrected_dispersion(E, ann, shape, 1.0);
    if (i == 0) first = e1;
    LipschitzReport r = lipschitz_probe(*s.model, *E, *e1, ann, s.m_theta, brackets, delta, s3);
    csv.row(i, amp, r.de0, r.de1, r.de2, r.dk0, r.dk1, r.dk2, r.q0, r.q1, r.q2);
    qmin = std::min(qmin, r.q0);
    qmax = std::max(qmax, r.q0);
  }
  double lambda = s.lambda();
  json summary = {{"pairs", pairs}, {"q0_min", qmin}, {"q0_max", qmax}, {"spread", qmin > 0 ? json(qmax / qmin) : json(nullptr)},
                  {"lambda", lambda}, {"model", s.model->kind()}};
  if (lambda != 0.0) {
    LipschitzReport r1 = lipschitz_probe(*s.model, *E, *first, ann, s.m_theta, brackets, delta, s3);
    LipschitzReport r2 = lipschitz_probe(*s.model->with_coupling(2 * lambda), *E, *first, ann, s.m_theta, brackets, delta, s3);
    summary["lambda_doubling_ratio"] = r1.q0 > 0 ? json(r2.q0 / r1.q0) : json(nullptr);
  }
  RunResult res;
  res.artifacts.push_back({"lipschitz.csv", csv.str()});
  res.artifacts.push_back(json_artifact("lipschitz.json", summary));
  res.message = "probed " + std::to_string(pairs) + " pairs";
  return res;
}

RunResult run_continuity_probe(const Config& c) {
  DispersionPtr E = build_dispersion(c);
  SolverConfig s = build_solver(c, E);
  AngularSamples shift = cosine_mode(s.m_theta, c.number("probe", "shift_amplitude", 1e-3), c.integer("probe", "shift_mode", 2));
  ContinuityReport r;
  try {
    r = continuity_probe(E, shift, c.number("probe", "interaction_scale", 1.1), s, c.number("probe", "delta", 0.5));
  } catch (const Error& err) {
    if (err.code() != ErrorCode::Divergence) throw;
    RunResult res;
    res.exit_code = kExitDivergence;
    res.message = err.what();
    return res;
  }
  RunResult res;
  res.artifacts.push_back(json_artifact("continuity.json", {{"dE0", r.dE0},
                                                            {"dE1", r.dE1},
                                                            {"dE2", r.dE2},
                                                            {"dV2", r.dV2},
                                                            {"d0", r.d0},
                                                            {"d1", r.d1},
                                                            {"d2", r.d2},
                                                            {"d2_half", r.d2_half},
                                                            {"delta", r.delta},
                                                            {"holder_envelope", r.holder_envelope},
                                                            {"line_bound", r.line_bound},
                                                            {"within_line_bound", r.within_line_bound},
                                                            {"monotone", r.monotone}}));
  res.message = r.monotone ? "halving the data did not increase the distance" : "distance is not monotone";
  return res;
}

RunResult run_volume_improvement(const Config& c, const RunOptions& o) {
  DispersionPtr e = build_dispersion(c);
  double eps1 = c.number("volume", "eps1", 0.05), eps2 = c.number("volume", "eps2", 0.05);
  std::vector<double> eps3 = c.numbers("volume", "eps3", {0.0025, 0.005, 0.01, 0.02, 0.04});
  Vec2 q{c.number("volume", "q1", 0.5), c.number("volume", "q2", 0.3)};
  int sign1 = c.integer("volume", "sign1", 1), sign2 = c.integer("volume", "sign2", 1);
  std::int64_t samples = static_cast<std::int64_t>(c.number("volume", "samples", 1e6));
  std::uint64_t seed = seed_for(c, "volume", o);
  if (!(eps1 > 0 && eps2 >= eps1) || samples < 1 || std::abs(sign1) != 1 || std::abs(sign2) != 1)
    fail(ErrorCode::Config, "invalid volume settings");
  for (double e3 : eps3)
    if (!(e3 >= eps2)) fail(ErrorCode::Config, "eps3 values must satisfy eps2 <= eps3");
  VolumeLadder lad = volume_ladder(*e, eps1, eps2, eps3, q, sign1, sign2, samples, seed);
  Csv csv("eps3,value,std_error,probability,samples");
  for (std::size_t i = 0; i < eps3.size(); ++i) {
    const auto& v = lad.estimates[i];
    csv.row(eps3[i], v.value, v.std_error, v.probability, v.samples);
  }
  std::vector<double> shell_eps = c.numbers("volume", "shell_eps", {0.01, 0.02, 0.04, 0.08});
  std::vector<double> xs, ys;
  Csv shells("eps,volume");
  for (double se : shell_eps) {
    double v = shell_volume(*e, se);
    shells.row(se, v);
    xs.push_back(std::log(se));
    ys.push_back(std::log(v));
  }
  double shell_slope = fit_slope(xs, ys);
  double max_rel = 0.0;
  for (const auto& v : lad.estimates)
    if (v.value > 0) max_rel = std::max(max_rel, v.std_error / v.value);
  RunResult res;
  res.artifacts.push_back({"volume.csv", csv.str()});
  res.artifacts.push_back({"shells.csv", shells.str()});
  res.artifacts.push_back(json_artifact("volume.json", {{"exponent", lad.exponent},
                                                        {"max_relative_error", max_rel},
                                                        {"shell_slope", shell_slope},
                                                        {"seed", seed},
                                                        {"samples", samples}}));
  res.message = "fitted exponent " + std::to_string(lad.exponent);
  return res;
}

RunResult run_graph_verify(const RunOptions& o) {
  if (o.max_vertices < 1 || o.max_vertices > 4) fail(ErrorCode::Config, "max-vertices must lie in 1..4");
  auto corpus = enumerate_two_legged_1pi(o.max_vertices);
  CorpusReport r = verify_corpus(corpus);
  std::string listing;
  for (std::size_t i = 0; i < corpus.size(); ++i) listing += "# graph " + std::to_string(i) + "\n" + to_edge_list(corpus[i]);
  RunResult res;
  res.artifacts.push_back({"corpus.txt", listing});
  res.artifacts.push_back(json_artifact("graph_report.json", {{"max_vertices", o.max_vertices},
                                                              {"corpus_size", r.graphs},
                                                              {"lemma_cases", r.lemma_cases},
                                                              {"lemma_passed", r.lemma_passed},
                                                              {"tree_count_matches", r.tree_count_matches},
                                                              {"plans_verified", r.plans_verified},
                                                              {"failures", r.failures},
                                                              {"all_passed", r.all_passed()}}));
  res.exit_code = r.all_passed() ? kExitOk : kExitCheckFailed;
  res.message = std::to_string(r.lemma_passed) + "/" + std::to_string(r.lemma_cases) + " lemma cases passed on " +
                std::to_string(r.graphs) + " graphs";
  return res;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"check-class",     "trace-surface",     "invert",
                                                 "scale-ledger",    "lipschitz-probe",   "continuity-probe",
                                                 "volume-improvement", "graph-verify"};
  return names;
}

RunResult run_command(const std::string& command, const Config* c, const RunOptions& o) {
  if (command == "graph-verify") return run_graph_verify(o);
  if (!c) fail(ErrorCode::Config, "command " + command + " needs a configuration");
  if (command == "check-class") return run_check_class(*c);
  if (command == "trace-surface") return run_trace_surface(*c);
  if (command == "invert") return run_invert(*c);
  if (command == "scale-ledger") return run_scale_ledger(*c);
  if (command == "lipschitz-probe") return run_lipschitz_probe(*c, o);
  if (command == "continuity-probe") return run_continuity_probe(*c);
  if (command == "volume-improvement") return run_volume_improvement(*c, o);
  fail(ErrorCode::Config, "unknown command: " + command);
}

}  // namespace fermi
