#include "fermi/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fermi/error.hpp"

namespace fermi {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"dispersion", {"family", "mu", "t", "a", "b", "radius", "c1", "c2", "file", "grid_n", "symmetric"}},
      {"interaction", {"family", "amplitude", "alpha", "w_amplitude"}},
      {"class", {"delta0", "g0", "G0", "omega0", "m_theta", "norm_grid"}},
      {"counterterm",
       {"model", "lambda", "shape", "gain", "lipschitz", "value", "M", "j_min", "sea_order", "shell_order", "j_lo",
        "j_hi"}},
      {"solver",
       {"epsilon", "r0", "radial_ball", "max_iterations", "tolerance", "m_theta", "nr", "G3", "divergence_steps",
        "check_iterates", "norm_grid", "delta"}},
      {"probe",
       {"pairs", "amplitude_min", "amplitude_max", "delta", "s3", "interaction_scale", "shift_amplitude", "shift_mode",
        "seed"}},
      {"volume", {"eps1", "eps2", "eps3", "q1", "q2", "sign1", "sign2", "samples", "seed", "shell_eps"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key, const std::string& v) {
  fail(ErrorCode::Config, "invalid value for [" + section + "] " + key + ": '" + v + "'");
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) bad_value(section, key, v);
    return x;
  } catch (const std::logic_error&) {
    bad_value(section, key, v);
  }
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& base_dir) {
  Config c;
  c.base_dir_ = base_dir;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::string where = " (line " + std::to_string(lineno) + ")";
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::Config, "malformed section header" + where);
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) fail(ErrorCode::Config, "unknown section [" + section + "]" + where);
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Config, "expected key=value" + where);
    if (section.empty()) fail(ErrorCode::Config, "key outside of a section" + where);
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!known_keys().at(section).count(key)) fail(ErrorCode::Config, "unknown key [" + section + "] " + key + where);
    if (c.data_[section].count(key)) fail(ErrorCode::Config, "duplicate key [" + section + "] " + key + where);
    c.data_[section][key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open configuration file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string dir = std::filesystem::path(path).parent_path().string();
  return parse(ss.str(), dir.empty() ? "." : dir);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = data_.find(section);
  return it != data_.end() && it->second.count(key);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!known_keys().count(section) || !known_keys().at(section).count(key))
    fail(ErrorCode::Config, "unknown key [" + section + "] " + key);
  data_[section][key] = value;
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? data_.at(section).at(key) : fallback;
}

std::string Config::text(const std::string& section, const std::string& key) const {
  if (!has(section, key)) fail(ErrorCode::Config, "missing key [" + section + "] " + key);
  return data_.at(section).at(key);
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

double Config::number(const std::string& section, const std::string& key) const {
  return parse_double(section, key, text(section, key));
}

int Config::integer(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = text(section, key);
  int x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(section, key, v);
  return x;
}

std::uint64_t Config::unsigned_integer(const std::string& section, const std::string& key,
                                       std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = text(section, key);
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(section, key, v);
  return x;
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = text(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(section, key, v);
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  std::stringstream ss(text(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(section, key, trim(item)));
  if (out.empty()) bad_value(section, key, text(section, key));
  return out;
}

std::string Config::path(const std::string& section, const std::string& key) const {
  std::filesystem::path p(text(section, key));
  if (p.is_relative()) p = std::filesystem::path(base_dir_) / p;
  return p.string();
}

DispersionPtr read_grid_dispersion_csv(const std::string& path, bool symmetric) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Config, "cannot open grid file: " + path);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Config, "empty grid file: " + path);
  int n = 0;
  try {
    n = std::stoi(trim(line));
  } catch (const std::logic_error&) {
    fail(ErrorCode::Config, "grid file must start with N: " + path);
  }
  if (n < 8) fail(ErrorCode::Config, "grid size too small in " + path);
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) fail(ErrorCode::Config, "grid file has too few rows: " + path);
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      v.push_back(parse_double("grid", path, trim(cell)));
      ++cols;
    }
    if (cols != n) fail(ErrorCode::Config, "grid row " + std::to_string(i) + " has wrong length in " + path);
  }
  while (std::getline(in, line))
    if (!trim(line).empty()) fail(ErrorCode::Config, "grid file has too many rows: " + path);
  return make_grid_dispersion(n, std::move(v), symmetric);
}

std::string grid_dispersion_csv(const Dispersion& e, int n) {
  std::ostringstream out;
  out.precision(17);
  out << n << "\n";
  double h = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? "," : "") << e.value({-kPi + i * h, -kPi + j * h});
    out << "\n";
  }
  return out.str();
}

DispersionPtr build_dispersion(const Config& c) {
  std::string family = c.text("dispersion", "family");
  DispersionPtr e;
  try {
    if (family == "grid") {
      e = read_grid_dispersion_csv(c.path("dispersion", "file"), c.flag("dispersion", "symmetric", false));
    } else if (family == "wrapped-quadratic") {
      e = make_dispersion(family, {c.number("dispersion", "mu")});
    } else if (family == "tight-binding") {
      e = make_dispersion(family, {c.number("dispersion", "t", 1.0), c.number("dispersion", "mu")});
    } else if (family == "ellipse") {
      e = make_dispersion(family, {c.number("dispersion", "a"), c.number("dispersion", "b"),
                                   c.number("dispersion", "c1", 0.0), c.number("dispersion", "c2", 0.0)});
    } else if (family == "circle") {
      e = make_dispersion(family, {c.number("dispersion", "radius"), c.number("dispersion", "c1", 0.0),
                                   c.number("dispersion", "c2", 0.0)});
    } else {
      fail(ErrorCode::Config, "unknown dispersion family: " + family);
    }
  } catch (const Error& err) {
    if (err.code() == ErrorCode::InvalidArgument) fail(ErrorCode::Config, err.what());
    throw;
  }
  if (c.has("dispersion", "grid_n") && family != "grid") e = sample_to_grid(*e, c.integer("dispersion", "grid_n", 128));
  return e;
}

InteractionPtr build_interaction(const Config& c) {
  std::string family = c.text("interaction", "family", "cosine");
  double amp = c.number("interaction", "amplitude", 1.0);
  double alpha = c.number("interaction", "alpha", 0.0);
  double w = c.number("interaction", "w_amplitude", 0.0);
  Interaction::Shape shape;
  if (family == "cosine") shape = Interaction::Shape::Cosine;
  else if (family == "constant") shape = Interaction::Shape::Constant;
  else fail(ErrorCode::Config, "unknown interaction family: " + family);
  if (w != 0.0) {
    if (!(alpha > 0.0)) fail(ErrorCode::Config, "a decaying interaction needs alpha > 0");
    return Interaction::decaying(shape, amp, alpha, w);
  }
  return shape == Interaction::Shape::Cosine ? Interaction::cosine(amp) : Interaction::constant(amp);
}

ClassParams build_class_params(const Config& c) {
  ClassParams p;
  p.delta0 = c.number("class", "delta0", p.delta0);
  p.g0 = c.number("class", "g0", p.g0);
  p.G0 = c.number("class", "G0", p.G0);
  p.omega0 = c.number("class", "omega0", p.omega0);
  try {
    p.validate();
  } catch (const Error& err) {
    fail(ErrorCode::Config, err.what());
  }
  return p;
}

ScaleCutoff build_cutoff(const Config& c) {
  ScaleCutoff s;
  s.M = c.number("counterterm", "M", s.M);
  s.j_min = c.integer("counterterm", "j_min", s.j_min);
  try {
    s.validate();
  } catch (const Error& err) {
    fail(ErrorCode::Config, err.what());
  }
  return s;
}

QuadratureSettings build_quadrature(const Config& c) {
  QuadratureSettings q;
  q.sea_order = c.integer("counterterm", "sea_order", q.sea_order);
  q.shell_order = c.integer("counterterm", "shell_order", q.shell_order);
  return q;
}

ModelPtr build_model(const Config& c, const DispersionPtr& E) {
  std::string kind = c.text("counterterm", "model", "fock");
  double lambda = c.number("counterterm", "lambda", 0.0);
  try {
    if (kind == "fock") return std::make_shared<FockCounterterm>(build_interaction(c), lambda, build_quadrature(c));
    if (kind == "scale-resolved")
      return std::make_shared<ScaleResolvedFock>(build_interaction(c), lambda, build_cutoff(c), build_quadrature(c));
    if (kind == "flat-scale")
      return std::make_shared<FlatScaleModel>(lambda, c.number("counterterm", "value", 1.0), build_cutoff(c));
    if (kind == "synthetic") {
      int m = c.integer("solver", "m_theta", 256);
      FermiRadiusTable t = trace_surface(*E, m);
      std::optional<double> L;
      if (c.has("counterterm", "lipschitz")) L = c.number("counterterm", "lipschitz");
      return make_synthetic(c.text("counterterm", "shape", "radius"), lambda, c.number("counterterm", "gain", 1.0), L,
                            *E, t, c.number("solver", "r0", 0.1));
    }
  } catch (const Error& err) {
    if (err.code() == ErrorCode::InvalidArgument) fail(ErrorCode::Config, err.what());
    throw;
  }
  fail(ErrorCode::Config, "unknown counterterm model: " + kind);
}

SolverConfig build_solver(const Config& c, const DispersionPtr& E) {
  SolverConfig s;
  s.model = build_model(c, E);
  s.params = build_class_params(c);
  s.epsilon = c.number("solver", "epsilon", s.epsilon);
  s.r0 = c.number("solver", "r0", s.r0);
  s.radial_ball = c.number("solver", "radial_ball", s.radial_ball);
  s.max_iterations = c.integer("solver", "max_iterations", s.max_iterations);
  s.tolerance = c.number("solver", "tolerance", s.tolerance);
  s.m_theta = c.integer("solver", "m_theta", s.m_theta);
  s.nr = c.integer("solver", "nr", s.nr);
  s.G3 = c.number("solver", "G3", s.G3);
  s.divergence_steps = c.integer("solver", "divergence_steps", s.divergence_steps);
  s.check_iterates = c.flag("solver", "check_iterates", s.check_iterates);
  s.norm_grid = c.integer("solver", "norm_grid", s.norm_grid);
  if (!(s.epsilon > 0 && s.r0 > 0 && s.radial_ball > 0 && s.tolerance > 0 && s.max_iterations >= 1 &&
        s.m_theta >= 64 && s.nr >= 9 && s.divergence_steps >= 1 && s.norm_grid >= 16))
    fail(ErrorCode::Config, "solver settings out of range");
  return s;
}

}  // namespace fermi
