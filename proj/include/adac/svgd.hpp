#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adac/matrix.hpp"
#include "adac/nn.hpp"
#include "adac/rng.hpp"

namespace adac::svgd {

// Fixed-bandwidth Gaussian kernel: h = d / K with d the action dimension and
// K the particle count; normalization 1 / (sqrt(2*pi) * h).
struct KernelSpec {
  double h = 1.0;
  double norm = 1.0;

  static KernelSpec for_dims(int action_dim, int particles);
};

double kernel(const double* a, const double* b, int d, const KernelSpec& spec);

// Gradient of kernel(a, bhat) with respect to bhat: (a - bhat)/h^2 * kernel.
void kernel_grad(const double* a, const double* bhat, int d, const KernelSpec& spec,
                 double* out);

struct SvgdConfig {
  int particles = 32;
  double beta = 1.0;
};

// Stein update directions for one particle set: for each particle l,
//   v_l = (1/K) * sum_j [ kernel(a_l, a_j) * grads_j + beta * dK/da_j(a_l, a_j) ].
// actions and grads are K x d; out is filled K x d.
void stein_directions(const Matrix& actions, const Matrix& grads, double beta,
                      const KernelSpec& spec, Matrix* out);

// Amortized SVGD policy gradient over a minibatch of states: draws K noise
// vectors per state, forms the particle actions f(s, xi_j), and accumulates
// the ascent gradient of the energy objective into the policy parameter
// grads, averaged over the M*K (state, xi) pairs. The critic supplies
// dQ/da at the particles; its parameters are left untouched.
void policy_gradient(nn::PolicyNet& policy, nn::CriticNet& critic,
                     const Matrix& states, const SvgdConfig& cfg, Rng& rng);

// One behavior action: clip(f(s, xi) + eps, bounds) with xi ~ N(0, I) and
// eps ~ N(0, h^2 I).
std::vector<double> sample_behavior_action(nn::PolicyNet& policy,
                                           const std::vector<double>& state,
                                           const KernelSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// 1-D toy mode: fit f(xi) to a target log density by the same update rule.

struct ToyTarget {
  std::string name;
  std::function<double(double)> log_density;
};

ToyTarget toy_target(const std::string& id);  // "unimodal" | "bimodal"

struct ToyDivergence : std::runtime_error {
  long step;
  explicit ToyDivergence(long s)
      : std::runtime_error("toy_fit diverged (non-finite) at step " + std::to_string(s)),
        step(s) {}
};

class ToySampler {
 public:
  ToySampler(const ToyTarget& target, double beta, long steps, int particles,
             double lr, std::uint64_t seed);

  double sample(Rng& rng);
  std::vector<double> sample_many(std::size_t n, Rng& rng);
  const KernelSpec& spec() const { return spec_; }

 private:
  nn::PolicyNet net_;
  KernelSpec spec_;
  double bound_;
};

}  // namespace adac::svgd
