#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fermi/counterterm.hpp"
#include "fermi/solver.hpp"

namespace fermi {

// Plain-text key=value file with [section] headers and '#' comments.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& base_dir = ".");
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::string text(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  double number(const std::string& section, const std::string& key) const;
  int integer(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t unsigned_integer(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback) const;
  // Paths are resolved against the directory of the configuration file.
  std::string path(const std::string& section, const std::string& key) const;
  const std::string& base_dir() const { return base_dir_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
  std::string base_dir_ = ".";
};

DispersionPtr read_grid_dispersion_csv(const std::string& path, bool symmetric);
std::string grid_dispersion_csv(const Dispersion& e, int n);

DispersionPtr build_dispersion(const Config& c);
InteractionPtr build_interaction(const Config& c);
ClassParams build_class_params(const Config& c);
ScaleCutoff build_cutoff(const Config& c);
QuadratureSettings build_quadrature(const Config& c);
// The counterterm model; synthetic models are calibrated on the annulus around E.
ModelPtr build_model(const Config& c, const DispersionPtr& E);
SolverConfig build_solver(const Config& c, const DispersionPtr& E);

}  // namespace fermi
