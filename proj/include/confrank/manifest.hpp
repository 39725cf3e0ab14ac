#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace confrank {

inline constexpr const char* kToolVersion = "0.1.0";

// Run manifest: the effective config plus input digests and output paths.
// Written with status "running" before work starts, finalized afterwards.
// Re-running a command with `--config <manifest.json>` reproduces its
// outputs byte-identically (timestamps live only here, never in outputs).
struct RunManifest {
  std::string command;
  nlohmann::ordered_json config;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();
  std::string started_utc;
  std::string finished_utc;
  std::string status = "running";

  void add_input(const std::string& name, const std::string& path);
  nlohmann::ordered_json to_json() const;
  void write(const std::string& path) const;
};

std::string utc_now_iso8601();

// Flat key=value or JSON config file. A manifest-style JSON (object with a
// "config" member) yields that member, so manifests can be replayed.
nlohmann::ordered_json load_config_file(const std::string& path);

}  // namespace confrank
