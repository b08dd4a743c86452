#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace matbf::cli {

enum ExitCode : int { kOk = 0, kBadInput = 2, kNumerical = 3, kInfeasible = 4 };

struct CommandResult {
  int code = kOk;
  std::vector<std::string> outputs;           // file names inside the output directory
  std::map<std::string, std::string> inputs;  // path -> sha256
  std::uint64_t seed = 0;
};

// Each command reads a fully resolved configuration object, so a run manifest
// can re-execute it verbatim.
CommandResult run_detect(const nlohmann::ordered_json& cfg, const std::string& out_dir);
CommandResult run_simulate(const nlohmann::ordered_json& cfg, const std::string& out_dir);
CommandResult run_calibrate(const nlohmann::ordered_json& cfg, const std::string& out_dir);

/// Runs `command`, then writes run_manifest.json with input and output digests.
int execute(const std::string& command, const nlohmann::ordered_json& cfg,
            const std::string& out_dir);

/// Re-runs a recorded command into out_dir and compares output digests.
int replay(const std::string& manifest_path, const std::string& out_dir);

}  // namespace matbf::cli
