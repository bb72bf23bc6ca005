#pragma once

#include <map>
#include <string>
#include <vector>

#include "chainforge/rational.hpp"

namespace chainforge {

// SHA-256 of a file's bytes, lowercase hex.
std::string sha256File(const std::string& path);

struct ManifestInput {
  std::string role;  // "network", "catalog", "requests"
  std::string path;
  std::string sha256;
};

// Everything needed to reproduce one CLI run byte-for-byte.
struct RunManifest {
  std::string command;  // subcommand name
  std::vector<ManifestInput> inputs;
  std::string mode;       // "all" or "heuristic" where applicable
  std::string objective;  // place only
  std::string backend;    // place only
  double timeLimitSec = 0.0;
  int threads = 1;
  uint64_t seed = 0;
  int remdrSteps = 0;      // pareto only
  int usedNodesSteps = 0;  // pareto only
  std::vector<std::string> outputs;
  std::map<std::string, double> timingsSec;

  std::string toJson() const;
  static RunManifest fromJson(const std::string& text);
};

void saveManifest(const RunManifest& m, const std::string& path);
RunManifest loadManifest(const std::string& path);

}  // namespace chainforge
