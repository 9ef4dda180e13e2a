#pragma once

#include <string>
#include <vector>

#include "adac/agents.hpp"
#include "adac/envs.hpp"
#include "adac/intrinsic.hpp"

namespace adac {

struct RunLogRow {
  long step = 0;
  long episode = 0;
  double behavior_return = 0.0;
  double eval_return = 0.0;
  double policy_bias = 0.0;
  double critic_loss_tar = 0.0;
  double critic_loss_beh = 0.0;
  double beta = 0.0;
};

struct RunResult {
  std::vector<RunLogRow> rows;
  double final_eval = 0.0;
  bool aborted = false;
  std::string abort_reason;
};

// One seeded training run: behavior-policy collection, intrinsic scoring,
// one update per environment step after warmup, periodic deterministic
// evaluation of pi. All randomness flows from `seed`.
RunResult train(envs::Env& env, envs::Env& eval_env, Agent& agent,
                IntrinsicReward& intrinsic, const AgentConfig& cfg,
                long total_steps, std::uint64_t seed);

std::string runlog_header();
std::string format_row(const RunLogRow& row);
void write_runlog_csv(const std::string& path, const std::vector<RunLogRow>& rows);

}  // namespace adac
