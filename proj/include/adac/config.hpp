#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adac/agents.hpp"

namespace adac {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment definition. Every run is fully determined by (config, seed);
// per-agent learning-rate defaults are applied before agent_config overrides.
struct RunConfig {
  std::string name;
  std::string env;
  std::string agent;
  std::vector<std::uint64_t> seeds;
  long total_steps = 0;
  std::string out_dir = "runs";
  int workers = 0;  // 0: one per seed up to hardware_concurrency
  AgentConfig agent_cfg;
};

// Parses the documented JSON schema; unknown keys are rejected. The ADAC_OUT
// environment variable overrides out_dir.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

}  // namespace adac
