#include "adac/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace adac {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (known.find(it.key()) == known.end())
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

void apply_agent_overrides(const json& j, AgentConfig& cfg) {
  static const std::set<std::string> known = {
      "gamma", "tau", "batch", "buffer_capacity", "warmup", "lr_critic",
      "lr_policy", "lr_behavior", "particles", "beta_start", "beta_end",
      "noise_dim", "hidden", "policy_delay", "smoothing_sigma", "noise_clip",
      "explore_sigma", "svgd_states", "split_policy", "eval_every",
      "eval_episodes", "bias_states", "bias_samples", "intrinsic", "kappa"};
  reject_unknown(j, known, "agent_config");
  if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
  if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
  if (j.contains("batch")) cfg.batch = j["batch"].get<int>();
  if (j.contains("buffer_capacity"))
    cfg.buffer_capacity = j["buffer_capacity"].get<std::size_t>();
  if (j.contains("warmup")) cfg.warmup = j["warmup"].get<int>();
  if (j.contains("lr_critic")) cfg.lr_critic = j["lr_critic"].get<double>();
  if (j.contains("lr_policy")) cfg.lr_policy = j["lr_policy"].get<double>();
  if (j.contains("lr_behavior")) cfg.lr_behavior = j["lr_behavior"].get<double>();
  if (j.contains("particles")) cfg.particles = j["particles"].get<int>();
  if (j.contains("beta_start")) cfg.beta_start = j["beta_start"].get<double>();
  if (j.contains("beta_end")) cfg.beta_end = j["beta_end"].get<double>();
  if (j.contains("noise_dim")) cfg.noise_dim = j["noise_dim"].get<int>();
  if (j.contains("hidden")) cfg.hidden = j["hidden"].get<std::vector<int>>();
  if (j.contains("policy_delay")) cfg.policy_delay = j["policy_delay"].get<int>();
  if (j.contains("smoothing_sigma"))
    cfg.smoothing_sigma = j["smoothing_sigma"].get<double>();
  if (j.contains("noise_clip")) cfg.noise_clip = j["noise_clip"].get<double>();
  if (j.contains("explore_sigma")) cfg.explore_sigma = j["explore_sigma"].get<double>();
  if (j.contains("svgd_states")) cfg.svgd_states = j["svgd_states"].get<int>();
  if (j.contains("split_policy")) cfg.split_policy = j["split_policy"].get<bool>();
  if (j.contains("eval_every")) cfg.eval_every = j["eval_every"].get<int>();
  if (j.contains("eval_episodes")) cfg.eval_episodes = j["eval_episodes"].get<int>();
  if (j.contains("bias_states")) cfg.bias_states = j["bias_states"].get<int>();
  if (j.contains("bias_samples")) cfg.bias_samples = j["bias_samples"].get<int>();
  if (j.contains("intrinsic")) cfg.intrinsic = j["intrinsic"].get<bool>();
  if (j.contains("kappa")) cfg.kappa = j["kappa"].get<double>();
}

void validate(const RunConfig& cfg) {
  if (cfg.env.empty()) throw ConfigError("missing required key 'env'");
  if (cfg.agent.empty()) throw ConfigError("missing required key 'agent'");
  if (cfg.seeds.empty()) throw ConfigError("'seeds' must be non-empty");
  if (cfg.total_steps < 0) throw ConfigError("'total_steps' must be >= 0");
  const AgentConfig& a = cfg.agent_cfg;
  if (a.gamma < 0.0 || a.gamma >= 1.0) throw ConfigError("gamma must be in [0, 1)");
  if (a.tau <= 0.0 || a.tau > 1.0) throw ConfigError("tau must be in (0, 1]");
  if (a.batch < 1) throw ConfigError("batch must be >= 1");
  if (a.particles < 1) throw ConfigError("particles must be >= 1");
  if (a.beta_end > a.beta_start)
    throw ConfigError("beta schedule must be non-increasing");
  if (a.beta_end <= 0.0) throw ConfigError("beta must stay positive");
  if (a.eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (a.kappa < 0.0) throw ConfigError("kappa must be >= 0");
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  static const std::set<std::string> known = {"name",        "env",     "agent",
                                              "seeds",       "total_steps",
                                              "out_dir",     "workers", "agent_config"};
  reject_unknown(j, known, "config");

  RunConfig cfg;
  if (j.contains("env")) cfg.env = j["env"].get<std::string>();
  if (j.contains("agent")) cfg.agent = j["agent"].get<std::string>();
  if (cfg.env.empty()) throw ConfigError("missing required key 'env'");
  if (cfg.agent.empty()) throw ConfigError("missing required key 'agent'");
  try {
    cfg.agent_cfg = AgentConfig::defaults_for(cfg.agent);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("name")) cfg.name = j["name"].get<std::string>();
  if (cfg.name.empty()) cfg.name = cfg.env + "-" + cfg.agent;
  if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("total_steps")) cfg.total_steps = j["total_steps"].get<long>();
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("agent_config")) apply_agent_overrides(j["agent_config"], cfg.agent_cfg);

  if (const char* env_out = std::getenv("ADAC_OUT"); env_out && *env_out)
    cfg.out_dir = env_out;
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace adac
