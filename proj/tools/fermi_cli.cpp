#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "fermi/fermi.h"

namespace {

int fail_with(fermi_status s) {
  std::cerr << "error: " << fermi_last_error() << "\n";
  return fermi_exit_code(s);
}

int run(const std::string& command, const std::string& config_path, const std::string& out_dir,
        const fermi_run_options& options) {
  fermi_config* cfg = nullptr;
  if (command != "graph-verify") {
    fermi_status s = fermi_config_load(config_path.c_str(), &cfg);
    if (s != FERMI_OK) return fail_with(s);
  }
  fermi_result* res = nullptr;
  fermi_status s = fermi_run(command.c_str(), cfg, &options, &res);
  fermi_config_free(cfg);
  if (s != FERMI_OK) return fail_with(s);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << "\n";
    fermi_result_free(res);
    return 2;
  }
  for (size_t i = 0; i < fermi_result_artifact_count(res); ++i) {
    std::filesystem::path p = std::filesystem::path(out_dir) / fermi_result_artifact_name(res, i);
    std::ofstream f(p, std::ios::binary);
    f << fermi_result_artifact_content(res, i);
    if (!f) {
      std::cerr << "error: cannot write " << p.string() << "\n";
      fermi_result_free(res);
      return 2;
    }
  }
  int code = fermi_result_exit_code(res);
  (code == 0 ? std::cout : std::cerr) << command << ": " << fermi_result_message(res) << "\n";
  fermi_result_free(res);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fermi surface inversion toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".";
  uint64_t seed = 0;
  int max_vertices = 4;
  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"check-class", "check the class conditions of a dispersion"},
      {"trace-surface", "trace the Fermi surface along rays"},
      {"invert", "solve the inversion problem by fixed-point iteration"},
      {"scale-ledger", "per-scale norms of the counterterm"},
      {"lipschitz-probe", "difference quotients of the counterterm"},
      {"continuity-probe", "dependence of the solution on E and V"},
      {"volume-improvement", "Monte-Carlo volume of shell intersections"},
      {"graph-verify", "exhaustive graph lemma checks"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    if (std::string(c.name) == "graph-verify") {
      sub->add_option("--max-vertices", max_vertices, "largest vertex count in the corpus");
    } else {
      sub->add_option("--config", config_path, "configuration file")->required();
      sub->add_option("--seed", seed, "random seed");
    }
    sub->add_option("--out", out_dir, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  CLI::App* chosen = app.get_subcommands().front();
  fermi_run_options options{0, 0, max_vertices};
  CLI::Option* seed_opt = chosen->get_option_no_throw("--seed");
  if (seed_opt && seed_opt->count() > 0) {
    options.has_seed = 1;
    options.seed = seed;
  }
  return run(chosen->get_name(), config_path, out_dir, options);
}
