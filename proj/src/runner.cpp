#include "adac/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace adac {

namespace {

double evaluate(envs::Env& eval_env, Agent& agent, int episodes, Rng& seed_rng) {
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    std::vector<double> obs = eval_env.reset(seed_rng.next_u64());
    while (true) {
      envs::StepResult r = eval_env.step(agent.eval_action(obs));
      total += r.reward;
      if (r.done()) break;
      obs = std::move(r.obs);
    }
  }
  return total / episodes;
}

}  // namespace

RunResult train(envs::Env& env, envs::Env& eval_env, Agent& agent,
                IntrinsicReward& intrinsic, const AgentConfig& cfg,
                long total_steps, std::uint64_t seed) {
  Rng train_rng(seed, 1);     // exploration, minibatches, svgd noise
  Rng episode_rng(seed, 2);   // environment reset seeds
  Rng eval_rng(seed, 3);      // evaluation reset seeds and bias draws

  RunResult result;
  ReplayBuffer buffer(cfg.buffer_capacity);

  long episode = 0;
  double episode_return = 0.0;
  double last_episode_return = 0.0;
  bool need_reset = true;
  std::vector<double> obs;

  auto log_point = [&](long step) {
    RunLogRow row;
    row.step = step;
    row.episode = episode;
    row.behavior_return = last_episode_return;
    row.eval_return = evaluate(eval_env, agent, cfg.eval_episodes, eval_rng);
    if (buffer.size() > 0) {
      Matrix states = buffer.recent_states(cfg.bias_states);
      row.policy_bias = agent.policy_bias(states, cfg.bias_samples, eval_rng);
    }
    row.critic_loss_tar = agent.last_loss_tar();
    row.critic_loss_beh = agent.last_loss_beh();
    row.beta = agent.beta();
    result.rows.push_back(row);
  };

  try {
    log_point(0);
    for (long t = 0; t < total_steps; ++t) {
      if (need_reset) {
        obs = env.reset(episode_rng.next_u64());
        episode_return = 0.0;
        need_reset = false;
      }

      std::vector<double> action;
      if (t < cfg.warmup) {
        action.resize(env.action_dim());
        const auto lo = env.action_low();
        const auto hi = env.action_high();
        for (int i = 0; i < env.action_dim(); ++i)
          action[i] = train_rng.uniform(lo[i], hi[i]);
      } else {
        action = agent.explore_action(obs, train_rng);
      }

      envs::StepResult sr = env.step(action);
      Transition tr;
      tr.s = obs;
      tr.a = action;
      tr.r = sr.reward;
      tr.s2 = sr.obs;
      tr.done = sr.terminated;
      intrinsic.update(tr);
      tr.r_in = intrinsic.score(tr);
      buffer.add(std::move(tr));

      episode_return += sr.reward;
      if (sr.done()) {
        last_episode_return = episode_return;
        ++episode;
        need_reset = true;
      } else {
        obs = std::move(sr.obs);
      }

      if (t >= cfg.warmup && buffer.size() >= static_cast<std::size_t>(cfg.batch)) {
        agent.set_progress(total_steps > 0 ? static_cast<double>(t) / total_steps : 0.0);
        agent.update(buffer, train_rng);
      }

      if ((t + 1) % cfg.eval_every == 0 || t + 1 == total_steps) {
        if (!agent.params_finite())
          throw NanError("non-finite parameters at step " + std::to_string(t + 1));
        log_point(t + 1);
      }
    }
    result.final_eval = result.rows.back().eval_return;
  } catch (const NanError& e) {
    result.aborted = true;
    result.abort_reason = e.what();
  }
  return result;
}

std::string runlog_header() {
  return "step,episode,behavior_return,eval_return,policy_bias,critic_loss_tar,"
         "critic_loss_beh,beta";
}

std::string format_row(const RunLogRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%ld,%ld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                r.step, r.episode, r.behavior_return, r.eval_return, r.policy_bias,
                r.critic_loss_tar, r.critic_loss_beh, r.beta);
  return buf;
}

void write_runlog_csv(const std::string& path, const std::vector<RunLogRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << runlog_header() << "\n";
  for (const auto& r : rows) out << format_row(r) << "\n";
}

}  // namespace adac
