#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>

#include "fermi/config.hpp"
#include "fermi/graph.hpp"
#include "fermi/runner.hpp"
#include "fermi/solver.hpp"
#include "oracles.hpp"

using namespace fermi;
using nlohmann::json;

namespace {

int failures = 0;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int id, bool pass, const std::string& detail, double seconds) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s  [%.2f s]\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Config load(const char* name) { return Config::load(std::string(CONFIG_DIR) + "/" + name); }

const Artifact& artifact(const RunResult& r, const std::string& name) {
  for (const auto& a : r.artifacts)
    if (a.name == name) return a;
  fail(ErrorCode::Internal, "missing artifact " + name);
}

double sup_diff(const AngularSamples& a, const AngularSamples& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Criteria 1-4
void inversion() {
  const double lambdas[] = {0.005, 0.01, 0.02};
  bool ok1 = true, ok2 = false;
  double worst_res = 0.0, worst_time = 0.0, ratio = 0.0;
  int worst_steps = 0;
  std::vector<double> disp;
  Clock total;
  for (double lambda : lambdas) {
    Config c = load("invert_fock.cfg");
    c.set("counterterm", "lambda", std::to_string(lambda));
    DispersionPtr E = build_dispersion(c);
    SolverConfig s = build_solver(c, E);
    Clock t;
    InversionResult r = invert(E, s);
    double secs = t.seconds();
    int steps = static_cast<int>(r.trace.steps.size()) - 1;
    double res = r.converged() ? sup_diff(s.model->evaluate(*r.solution, trace_surface(*r.solution, s.m_theta)), r.correction)
                               : INFINITY;
    ok1 = ok1 && r.converged() && res <= 1e-8 && steps <= 30 && secs < 120.0;
    worst_res = std::max(worst_res, res);
    worst_steps = std::max(worst_steps, steps);
    worst_time = std::max(worst_time, secs);
    disp.push_back(r.displacement2 / lambda);
    if (lambda == 0.01) {
      std::vector<double> n, lf;
      for (const auto& st : r.trace.steps)
        if (st.n >= 2 && st.f0 > 1e-14) {
          n.push_back(st.n);
          lf.push_back(std::log(st.f0));
        }
      if (n.size() >= 2) {
        ratio = std::exp(fit_slope(n, lf));
        ok2 = ratio <= 0.5;
      }
    }
  }
  report(1, ok1,
         "max residual " + fmt("%.2e", worst_res) + ", max iterations " + std::to_string(worst_steps) +
             ", slowest run " + fmt("%.2f s", worst_time),
         total.seconds());
  report(2, ok2, "fitted ratio at lambda=0.01: " + fmt("%.4f", ratio), 0.0);
  double lo = *std::min_element(disp.begin(), disp.end()), hi = *std::max_element(disp.begin(), disp.end());
  report(3, hi / lo - 1.0 <= 0.25,
         "|e-E|_2/lambda = " + fmt("%.4f", disp[0]) + " / " + fmt("%.4f", disp[1]) + " / " + fmt("%.4f", disp[2]) +
             ", spread " + fmt("%.2f%%", 100 * (hi / lo - 1.0)),
         0.0);

  Clock t4;
  Config c = load("invert_fock.cfg");
  DispersionPtr E = build_dispersion(c);
  SolverConfig s = build_solver(c, E);
  AngularSamples P(s.m_theta);
  for (int i = 0; i < s.m_theta; ++i) P[i] = 0.3 * s.epsilon * (0.8 + 0.2 * std::cos(2 * angle_of(i, s.m_theta)));
  double d = uniqueness_probe(E, s, P);
  report(4, d <= 1e-7, "|e-e'|_0 = " + fmt("%.2e", d), t4.seconds());
}

// Criteria 5-6
void geometry() {
  const int m = 1024;
  const double slack = 10 * kTwoPi / m;
  const std::pair<double, double> shapes[] = {{1.2, 0.8}, {1.5, 0.6}, {1.0, 1.0}};
  Clock t5;
  bool ok5 = true;
  double worst_margin = INFINITY, worst_center = 0.0;
  for (auto [a, b] : shapes) {
    auto e = make_dispersion("ellipse", {a, b});
    auto t = trace_surface(*e, m);
    ConvexCenterReport rep = convex_center(t, *e);
    double kmin = std::min(b / (a * a), a / (b * b)), kmax = std::max(b / (a * a), a / (b * b));
    for (int i = 0; i < t.size(); ++i) {
      Vec2 p = t.point(i), d = p - rep.center;
      double dist = norm(d);
      Vec2 nrm{p.x / (a * a), p.y / (b * b)};
      double cosang = (d.x * nrm.x + d.y * nrm.y) / (dist * norm(nrm));
      double margin = std::min({dist - (1 / kmax - slack), 1 / kmin + slack - dist, cosang - (kmin / kmax - slack)});
      worst_margin = std::min(worst_margin, margin);
    }
    worst_center = std::max(worst_center, norm(rep.center));
    ok5 = ok5 && rep.radius_bounds && rep.angle_bound;
  }
  ok5 = ok5 && worst_margin >= 0.0 && worst_center <= 1e-8;
  report(5, ok5, "min bound margin " + fmt("%.3e", worst_margin) + ", max |c| " + fmt("%.2e", worst_center),
         t5.seconds());

  Clock t6;
  double worst = 0.0;
  for (auto [a, b] : shapes) {
    auto e = make_dispersion("ellipse", {a, b});
    auto t = trace_surface(*e, m);
    std::vector<double> phi(m);
    for (int i = 0; i < m; ++i) {
      Vec2 p = t.point(i);
      phi[i] = std::atan2(p.y / (b * b), p.x / (a * a));
    }
    for (int i = 1; i < m; ++i) phi[i] += kTwoPi * std::round((phi[i - 1] - phi[i]) / kTwoPi);
    auto at = [&](int k) { return phi[(k % m + m) % m] + kTwoPi * std::floor(static_cast<double>(k) / m); };
    auto pt = [&](int k) { return t.point((k % m + m) % m); };
    const double h = kTwoPi / m;
    for (int i = 0; i < m; ++i) {
      double dphi = (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) / (12 * h);
      Vec2 dp = (1.0 / (12 * h)) * (-1.0 * pt(i + 2) + 8.0 * pt(i + 1) - 8.0 * pt(i - 1) + pt(i - 2));
      double fd = dphi / norm(dp);
      worst = std::max(worst, std::abs(curvature(*e, t.point(i)) - fd));
    }
  }
  report(6, worst <= 1e-4, "sup |kappa - Gauss-map FD| = " + fmt("%.2e", worst), t6.seconds());
}

// Criterion 7
void products() {
  Clock t;
  std::mt19937_64 rng(20240601);
  const double slack = 1.05;
  auto circle = make_dispersion("circle", {1.0});
  auto table = trace_surface(*circle, 256);
  double worst = 0.0, identity = 0.0;  // largest lhs / rhs, largest relative defect of the localized equalities
  auto same = [&](double a, double b) { identity = std::max(identity, std::abs(a - b) / std::max(std::abs(b), 1e-300)); };
  auto track = [&](double lhs, double rhs) { worst = std::max(worst, rhs > 0 ? lhs / rhs : (lhs > 0 ? INFINITY : 0)); };
  for (int pair = 0; pair < 100; ++pair) {
    auto tf = oracle::random_trig(rng), tg = oracle::random_trig(rng);
    auto F = GridField::sample_cartesian(tf, 96), G = GridField::sample_cartesian(tg, 96);
    auto rf = ck_norms(F, 3), rg = ck_norms(G, 3), rfg = ck_norms(F * G, 3);
    for (int p = 0; p <= 3; ++p) track(rfg.norm[p], std::pow(2.0, p) * rf.norm[p] * rg.norm[p]);
    for (int p = 1; p <= 3; ++p)
      track(rfg.norm[p], rf.seminorm[0] * rg.seminorm[p] + rf.seminorm[p] * rg.seminorm[0] +
                             std::pow(2.0, p + 1) * rf.norm[p - 1] * rg.norm[p - 1]);
    auto Fp = GridField::sample_polar(tf, 0.7, 1.3, 33, 256), Gp = GridField::sample_polar(tg, 0.7, 1.3, 33, 256);
    auto pf = ck_norms(Fp, 3), pg = ck_norms(Gp, 3), pfg = ck_norms(Fp * Gp, 3);
    for (int p = 0; p <= 2; ++p) {
      track(pf.radial[p + 1], pf.norm[p + 1]);
      track(pfg.radial[p + 1], std::pow(2.0, p + 2) * (pf.radial[p + 1] * pg.norm[p] + pf.norm[p] * pg.radial[p + 1]));
    }
    auto lf = ck_norms(localize(*circle, Fp, table), 3);
    for (int p = 1; p <= 3; ++p) {
      same(lf.radial[p], lf.norm[p - 1]);
      same(lf.angular[p - 1], lf.norm[p - 1]);
    }
  }
  double secs = t.seconds();
  report(7, worst <= slack && identity <= 0.05 && secs < 30.0,
         "max lhs/rhs over 100 pairs " + fmt("%.4f", worst) + ", localized identity defect " + fmt("%.1e", identity),
         secs);
}

// Criteria 8-9
void scales() {
  Clock t8;
  Config c = load("scale_ledger.cfg");
  ScaleCutoff cut = build_cutoff(c);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(std::log(std::pow(cut.M, cut.j_min)), std::log(2.0));
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double x = std::exp(u(rng));
    double s = 1.0 - cut.profile(x * x);
    for (int j = cut.j_min; j <= 0; ++j) s += cut.chi(j, x);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  DispersionPtr E = build_dispersion(c);
  auto table = trace_surface(*E, 128);
  InteractionPtr v = build_interaction(c);
  double lambda = c.number("counterterm", "lambda");
  ScaleResolvedFock sr(v, lambda, cut);
  FockCounterterm full(v, lambda);
  double dk = sup_diff(sr.evaluate(*E, table), full.evaluate(*E, table));
  report(8, worst <= 1e-10 && dk <= 1e-4,
         "partition defect " + fmt("%.2e", worst) + ", |sum_j K_j - K| " + fmt("%.2e", dk), t8.seconds());

  Clock t9;
  RunResult r = run_command("scale-ledger", &c, {});
  double slope = json::parse(artifact(r, "ledger.json").content).at("slope").get<double>();
  report(9, r.exit_code == 0 && slope >= 0.2, "fitted slope " + fmt("%.4f", slope), t9.seconds());
}

// Criterion 10
void lipschitz() {
  Clock t;
  Config c = load("lipschitz_probe.cfg");
  RunResult r = run_command("lipschitz-probe", &c, {});
  json s = json::parse(artifact(r, "lipschitz.json").content);
  std::istringstream csv(artifact(r, "lipschitz.csv").content);
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  double de_min = INFINITY, de_max = 0.0;
  while (std::getline(csv, line)) {
    std::istringstream ls(line);
    std::string cell;
    for (int k = 0; k < 3; ++k) std::getline(ls, cell, ',');
    double de0 = std::stod(cell);
    de_min = std::min(de_min, de0);
    de_max = std::max(de_max, de0);
    ++rows;
  }
  double spread = s.at("spread").is_number() ? s.at("spread").get<double>() : INFINITY;
  double doubling = s.at("lambda_doubling_ratio").is_number() ? s.at("lambda_doubling_ratio").get<double>() : 0.0;
  bool ok = rows == 50 && de_min <= 2e-4 && de_max >= 5e-2 && spread <= 10.0 && std::abs(doubling - 2.0) <= 0.1;
  report(10, ok,
         "50 pairs, |de|_0 in [" + fmt("%.1e", de_min) + ", " + fmt("%.1e", de_max) + "], spread " + fmt("%.3f", spread) +
             ", lambda doubling ratio " + fmt("%.4f", doubling),
         t.seconds());
}

// Criterion 11
bool labellings_match_brute_force(int& trees) {
  auto g = parse_edge_list("0 1\n1 2\n2 3\n3 0\n0 2\n1 3\next 0\next 2\n");
  std::mt19937_64 rng(11);
  const ForkKind kinds[] = {ForkKind::RFork, ForkKind::CFork, ForkKind::Plain};
  for (int trial = 0; trial < 500; ++trial) {
    GnTree t = root_only_tree(g);
    int target = 1 + static_cast<int>(rng() % 4);
    for (int guard = 0; t.size() < target && guard < 50; ++guard) {
      int parent = static_cast<int>(rng() % t.size());
      std::vector<int> free = t.forks[parent].vertices;
      for (int c : t.children(parent))
        for (int v : t.forks[c].vertices) free.erase(std::remove(free.begin(), free.end(), v), free.end());
      if (free.empty()) continue;
      std::shuffle(free.begin(), free.end(), rng);
      free.resize(1 + rng() % free.size());
      std::sort(free.begin(), free.end());
      t.forks.push_back({parent, kinds[rng() % 3], free});
    }
    int j = -1 - static_cast<int>(rng() % 6);
    int I = j - static_cast<int>(rng() % (7 + j));
    auto got = enumerate_labellings(t, g, j, I);
    std::vector<std::vector<int>> expect;
    int span = 2 - I, free_forks = t.size() - 1;
    long total = 1;
    for (int k = 0; k < free_forks; ++k) total *= span;
    for (long code = 0; code < total; ++code) {
      std::vector<int> s(t.size());
      s[0] = j;
      long c = code;
      for (int f = free_forks; f >= 1; --f) {
        s[f] = I + static_cast<int>(c % span);
        c /= span;
      }
      bool ok = true;
      for (int f = 1; f < t.size() && ok; ++f) {
        int ps = s[t.forks[f].parent];
        ok = t.forks[f].kind == ForkKind::CFork ? (I <= s[f] && s[f] <= ps) : (s[f] > ps && s[f] <= 1);
      }
      if (ok) expect.push_back(s);
    }
    if (got.size() != expect.size()) return false;
    for (std::size_t k = 0; k < got.size(); ++k)
      if (got[k].fork_scale != expect[k]) return false;
    ++trees;
  }
  return true;
}

void graphs() {
  Clock t;
  CorpusReport rep = verify_corpus(enumerate_two_legged_1pi(4));
  int trees = 0;
  bool lab = labellings_match_brute_force(trees);
  double secs = t.seconds();
  bool ok = rep.all_passed() && rep.lemma_cases == rep.lemma_passed && rep.tree_count_matches == rep.graphs && lab &&
            secs < 60.0;
  report(11, ok,
         std::to_string(rep.graphs) + " graphs, lemma " + std::to_string(rep.lemma_passed) + "/" +
             std::to_string(rep.lemma_cases) + ", tree counts " + std::to_string(rep.tree_count_matches) + "/" +
             std::to_string(rep.graphs) + ", labellings on " + std::to_string(trees) + " trees " +
             (lab ? "match" : "differ"),
         secs);
}

// Criterion 12
void volume() {
  Clock t;
  Config c = load("volume_circle.cfg");
  RunResult r = run_command("volume-improvement", &c, {});
  json s = json::parse(artifact(r, "volume.json").content);
  double exponent = s.at("exponent").get<double>(), err = s.at("max_relative_error").get<double>();
  double slope = s.at("shell_slope").get<double>();
  long samples = s.at("samples").get<long>();
  bool ok = samples >= 1000000 && exponent > 0.3 && err < 0.2 && std::abs(slope - 1.0) <= 0.1;
  report(12, ok,
         "exponent " + fmt("%.4f", exponent) + ", max relative SE " + fmt("%.4f", err) + ", shell slope " +
             fmt("%.4f", slope),
         t.seconds());
}

// Criterion 13
void radial_constants() {
  Clock t;
  ClassParams p;
  RadialConstants rc = derive_radial_constants(p);
  double g1 = p.omega0 * p.g0 * p.g0 / (4 * p.G0 * p.G0);
  double r0 = std::min(g1 / p.G0, p.delta0);
  bool exact = rc.g1 == g1 && rc.r0 == r0;
  auto E0 = make_dispersion("wrapped-quadratic", {0.5});
  auto table = trace_surface(*E0, 256);
  std::mt19937_64 rng(13);
  double worst = INFINITY;
  for (int k = 0; k < 20; ++k) {
    auto delta = std::make_shared<TrigPolynomial>(oracle::random_trig(rng));
    PerturbedDispersion e(E0, delta, g1 / delta->norm_bound(1), true);
    worst = std::min(worst, min_radial_derivative(e, table, rc.r0));
  }
  report(13, exact && worst > g1,
         std::string("constants ") + (exact ? "exact" : "differ") + ", min radial derivative " + fmt("%.4f", worst) +
             " > g1 = " + fmt("%.3e", g1),
         t.seconds());
}

}  // namespace

int main() {
  const std::function<void()> parts[] = {inversion, geometry, products, scales, lipschitz, graphs, volume, radial_constants};
  for (const auto& part : parts) {
    try {
      part();
    } catch (const std::exception& e) {
      ++failures;
      std::printf("error: %s\n", e.what());
    }
  }
  std::printf("%s: %d failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
