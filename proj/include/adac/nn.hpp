#pragma once

#include <string>
#include <utility>
#include <vector>

#include "adac/autodiff.hpp"
#include "adac/matrix.hpp"
#include "adac/rng.hpp"

namespace adac::nn {

struct Linear {
  ad::Tensor W;  // in x out
  ad::Tensor b;  // 1 x out

  // DDPG-style fan-in init: U(-1/sqrt(in), 1/sqrt(in)) unless a limit is given.
  void init(std::size_t in, std::size_t out, Rng& rng, double limit = 0.0);
  ad::Var forward(ad::Graph& g, ad::Var x);
};

// Shared policy network f(s, xi): the target policy is f(s, 0), the behavior
// policy draws xi ~ N(0, I). Hidden relu layers, tanh head scaled to the
// action bounds. noise_dim = 0 gives a plain deterministic actor.
class PolicyNet {
 public:
  PolicyNet(int state_dim, int action_dim, int noise_dim,
            const std::vector<int>& hidden, const std::vector<double>& low,
            const std::vector<double>& high, Rng& rng);

  ad::Var forward(ad::Graph& g, ad::Var states, ad::Var xi);
  ad::Var forward_det(ad::Graph& g, ad::Var states);  // xi = 0

  // Convenience single-graph evaluations.
  Matrix act(const Matrix& states, const Matrix& xi);
  Matrix act_det(const Matrix& states);

  std::vector<ad::Tensor*> params();
  void zero_grad();

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  int noise_dim() const { return noise_dim_; }
  const std::vector<double>& low() const { return low_; }
  const std::vector<double>& high() const { return high_; }

 private:
  int state_dim_, action_dim_, noise_dim_;
  std::vector<double> low_, high_;
  Matrix half_, center_;
  std::vector<Linear> layers_;
};

// Q(s, a): scalar per row.
class CriticNet {
 public:
  CriticNet(int state_dim, int action_dim, const std::vector<int>& hidden, Rng& rng);

  ad::Var forward(ad::Graph& g, ad::Var states, ad::Var actions);
  Matrix value(const Matrix& states, const Matrix& actions);

  std::vector<ad::Tensor*> params();
  void zero_grad();

 private:
  int state_dim_, action_dim_;
  std::vector<Linear> layers_;
};

class Adam {
 public:
  Adam() = default;
  Adam(std::vector<ad::Tensor*> params, double lr);

  // Applies one Adam update from the current grads; grads are left untouched.
  void step();

  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

 private:
  std::vector<ad::Tensor*> params_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

// target := tau * online + (1 - tau) * target, elementwise.
void soft_update(const std::vector<ad::Tensor*>& target,
                 const std::vector<ad::Tensor*>& online, double tau);
void copy_params(const std::vector<ad::Tensor*>& dst,
                 const std::vector<ad::Tensor*>& src);
bool params_equal(const std::vector<ad::Tensor*>& a,
                  const std::vector<ad::Tensor*>& b);
void negate_grads(const std::vector<ad::Tensor*>& params);

// Temporarily clears requires_grad, so reverse passes skip these tensors.
class FreezeGuard {
 public:
  explicit FreezeGuard(std::vector<ad::Tensor*> params);
  ~FreezeGuard();
  FreezeGuard(const FreezeGuard&) = delete;
  FreezeGuard& operator=(const FreezeGuard&) = delete;

 private:
  std::vector<ad::Tensor*> params_;
  std::vector<bool> saved_;
};

// Checkpoints: line-oriented text, values as hex floats so round-trips are
// bit-exact. Format documented in the README.
void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const ad::Tensor*>>& tensors);
void load_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, ad::Tensor*>>& tensors);

}  // namespace adac::nn
