#pragma once

#include <map>
#include <string>

#include <json.hpp>

namespace matbf::cli {

/// Lowercase hex SHA-256 of a file's bytes. InputError when unreadable.
std::string sha256_file(const std::string& path);

std::string utc_now();

/// Written next to the outputs of every run as run_manifest.json.
struct RunManifest {
  std::string command;
  std::string tool_version;
  nlohmann::ordered_json config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;   // path -> digest
  std::map<std::string, std::string> outputs;  // file name -> digest
  std::string started_at;
  std::string finished_at;

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

void write_run_manifest(const std::string& dir, const RunManifest& m);
RunManifest read_run_manifest(const std::string& path);

}  // namespace matbf::cli
