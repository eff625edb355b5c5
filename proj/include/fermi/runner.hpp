#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fermi/config.hpp"
#include "fermi/error.hpp"

namespace fermi {

struct Artifact {
  std::string name;
  std::string content;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int max_vertices = 4;
};

struct RunResult {
  int exit_code = 0;
  std::string message;
  std::vector<Artifact> artifacts;
};

enum ExitCode { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitGeometry = 3, kExitDivergence = 4, kExitInternal = 5 };

int exit_code_for(ErrorCode code);

const std::vector<std::string>& command_names();
// Throws Error on configuration or geometry failures; divergence is reported through the exit code.
RunResult run_command(const std::string& command, const Config* config, const RunOptions& options);

RunResult run_check_class(const Config& c);
RunResult run_trace_surface(const Config& c);
RunResult run_invert(const Config& c);
RunResult run_scale_ledger(const Config& c);
RunResult run_lipschitz_probe(const Config& c, const RunOptions& o);
RunResult run_continuity_probe(const Config& c);
RunResult run_volume_improvement(const Config& c, const RunOptions& o);
RunResult run_graph_verify(const RunOptions& o);

}  // namespace fermi
