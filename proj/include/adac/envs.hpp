#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "adac/rng.hpp"

namespace adac::envs {

struct StepResult {
  std::vector<double> obs;
  double reward = 0.0;
  bool terminated = false;  // physics termination (failure or goal)
  bool truncated = false;   // episode length limit

  bool done() const { return terminated || truncated; }
};

// Seeded deterministic episodic environment. Identical (seed, action sequence)
// must produce a bit-identical trajectory. step() after the episode ended is
// a logic error until reset().
class Env {
 public:
  virtual ~Env() = default;

  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(const std::vector<double>& action) = 0;

  virtual int obs_dim() const = 0;
  virtual int action_dim() const { return 1; }
  virtual std::vector<double> action_low() const = 0;
  virtual std::vector<double> action_high() const = 0;
  virtual int max_steps() const = 0;
  virtual std::string id() const = 0;

  // Fixed per-dimension observation ranges, used by the count-based grid.
  virtual std::vector<std::pair<double, double>> obs_ranges() const = 0;
};

// Registry ids: cartpole-mod, pendulum-sparse, acrobot-cont,
// mountaincar-cont, cartpole-swingup-sparse.
std::unique_ptr<Env> make_env(const std::string& id);
std::vector<std::string> env_ids();

}  // namespace adac::envs
