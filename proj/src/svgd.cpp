#include "adac/svgd.hpp"

#include <cmath>

namespace adac::svgd {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;

double clip(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }
}  // namespace

KernelSpec KernelSpec::for_dims(int action_dim, int particles) {
  if (action_dim < 1 || particles < 1)
    throw std::invalid_argument("KernelSpec: need action_dim >= 1 and particles >= 1");
  KernelSpec s;
  s.h = static_cast<double>(action_dim) / static_cast<double>(particles);
  s.norm = 1.0 / (kSqrt2Pi * s.h);
  return s;
}

double kernel(const double* a, const double* b, int d, const KernelSpec& spec) {
  double sq = 0.0;
  for (int i = 0; i < d; ++i) {
    const double diff = a[i] - b[i];
    sq += diff * diff;
  }
  return spec.norm * std::exp(-sq / (2.0 * spec.h * spec.h));
}

void kernel_grad(const double* a, const double* bhat, int d, const KernelSpec& spec,
                 double* out) {
  const double k = kernel(a, bhat, d, spec);
  const double inv_h2 = 1.0 / (spec.h * spec.h);
  for (int i = 0; i < d; ++i) out[i] = (a[i] - bhat[i]) * inv_h2 * k;
}

void stein_directions(const Matrix& actions, const Matrix& grads, double beta,
                      const KernelSpec& spec, Matrix* out) {
  const std::size_t K = actions.rows;
  const int d = static_cast<int>(actions.cols);
  if (grads.rows != K || grads.cols != actions.cols)
    throw std::invalid_argument("stein_directions: actions/grads shape mismatch");
  if (K < 2 && beta != 0.0)
    throw std::invalid_argument(
        "stein_directions: need at least 2 particles when beta != 0");
  *out = Matrix(K, d);
  std::vector<double> kg(d);
  const double inv_k = 1.0 / static_cast<double>(K);
  for (std::size_t l = 0; l < K; ++l) {
    double* v = out->row(l);
    for (std::size_t j = 0; j < K; ++j) {
      const double k = kernel(actions.row(l), actions.row(j), d, spec);
      const double* g = grads.row(j);
      const double inv_h2 = 1.0 / (spec.h * spec.h);
      for (int i = 0; i < d; ++i) {
        const double rep = (actions.row(l)[i] - actions.row(j)[i]) * inv_h2 * k;
        v[i] += k * g[i] + beta * rep;
      }
    }
    for (int i = 0; i < d; ++i) v[i] *= inv_k;
  }
}

void policy_gradient(nn::PolicyNet& policy, nn::CriticNet& critic,
                     const Matrix& states, const SvgdConfig& cfg, Rng& rng) {
  const std::size_t M = states.rows;
  const int K = cfg.particles;
  const int d = policy.action_dim();
  const int nxi = policy.noise_dim();
  if (K < 1 || (K < 2 && cfg.beta != 0.0))
    throw std::invalid_argument("svgd policy_gradient: need K >= 2 when beta != 0");

  // Flow batch: state i occupies rows i*K .. i*K+K-1, one fresh xi per row.
  Matrix flow_states(M * K, states.cols);
  Matrix xi(M * K, nxi);
  for (std::size_t i = 0; i < M; ++i)
    for (int j = 0; j < K; ++j) {
      double* dst = flow_states.row(i * K + j);
      const double* src = states.row(i);
      for (std::size_t c = 0; c < states.cols; ++c) dst[c] = src[c];
    }
  for (auto& v : xi.a) v = rng.normal();

  ad::Graph g;
  ad::Var s_var = g.constant(flow_states);
  ad::Var a_var = policy.forward(g, s_var, g.constant(xi));
  const Matrix actions = a_var.value();

  // dQ/da at the particles; the mask keeps critic parameters out of this pass.
  Matrix action_grads;
  {
    ad::Graph gc;
    ad::Var sc = gc.constant(flow_states);
    ad::Var ac = gc.constant(actions);
    ad::Var q = critic.forward(gc, sc, ac);
    action_grads = gc.grad_wrt_input(q, ac);
  }

  const KernelSpec spec = KernelSpec::for_dims(d, K);
  Matrix seed(M * K, d);
  Matrix part(K, d), pgrad(K, d), dirs;
  const double scale = 1.0 / static_cast<double>(M * K);
  for (std::size_t i = 0; i < M; ++i) {
    for (int j = 0; j < K; ++j)
      for (int c = 0; c < d; ++c) {
        part(j, c) = actions(i * K + j, c);
        pgrad(j, c) = action_grads(i * K + j, c);
      }
    stein_directions(part, pgrad, cfg.beta, spec, &dirs);
    for (int j = 0; j < K; ++j)
      for (int c = 0; c < d; ++c) seed(i * K + j, c) = dirs(j, c) * scale;
  }

  g.backward_seeded(a_var, seed);
}

std::vector<double> sample_behavior_action(nn::PolicyNet& policy,
                                           const std::vector<double>& state,
                                           const KernelSpec& spec, Rng& rng) {
  const int d = policy.action_dim();
  Matrix s(1, state.size());
  s.a = state;
  Matrix xi(1, policy.noise_dim());
  for (auto& v : xi.a) v = rng.normal();
  Matrix a = policy.act(s, xi);
  std::vector<double> out(d);
  for (int i = 0; i < d; ++i)
    out[i] = clip(a(0, i) + rng.normal(0.0, spec.h), policy.low()[i], policy.high()[i]);
  return out;
}

ToyTarget toy_target(const std::string& id) {
  if (id == "unimodal") {
    return {"unimodal", [](double x) { return -0.5 * x * x; }};
  }
  if (id == "bimodal") {
    // 0.5 N(-2, 0.6^2) + 0.5 N(2, 0.6^2)
    return {"bimodal", [](double x) {
              const double s = 0.6;
              const double l1 = -0.5 * (x + 2.0) * (x + 2.0) / (s * s);
              const double l2 = -0.5 * (x - 2.0) * (x - 2.0) / (s * s);
              const double m = l1 > l2 ? l1 : l2;
              return m + std::log(std::exp(l1 - m) + std::exp(l2 - m));
            }};
  }
  throw std::invalid_argument("unknown toy target: " + id);
}

namespace {
nn::PolicyNet make_toy_net(std::uint64_t seed, double bound) {
  Rng rng(seed, 7001);
  return nn::PolicyNet(0, 1, 16, {64, 64}, {-bound}, {bound}, rng);
}
}  // namespace

ToySampler::ToySampler(const ToyTarget& target, double beta, long steps,
                       int particles, double lr, std::uint64_t seed)
    : net_(make_toy_net(seed, 6.0)),
      spec_(KernelSpec::for_dims(1, particles)),
      bound_(6.0) {
  Rng rng(seed, 7002);
  nn::Adam opt(net_.params(), lr);
  const double fd_h = 1e-6;
  const int K = particles;
  Matrix states(K, 0);
  Matrix xi(K, net_.noise_dim());
  Matrix grads(K, 1), dirs;
  for (long step = 0; step < steps; ++step) {
    for (auto& v : xi.a) v = rng.normal();
    ad::Graph g;
    ad::Var a_var = net_.forward(g, g.constant(states), g.constant(xi));
    Matrix actions = a_var.value();
    for (int j = 0; j < K; ++j) {
      const double a = actions(j, 0);
      if (!std::isfinite(a)) throw ToyDivergence(step);
      grads(j, 0) =
          (target.log_density(a + fd_h) - target.log_density(a - fd_h)) / (2.0 * fd_h);
    }
    stein_directions(actions, grads, beta, spec_, &dirs);
    Matrix seed_mat(K, 1);
    for (int j = 0; j < K; ++j) seed_mat(j, 0) = dirs(j, 0) / static_cast<double>(K);
    net_.zero_grad();
    g.backward_seeded(a_var, seed_mat);
    nn::negate_grads(net_.params());
    opt.step();
    for (auto* t : net_.params())
      for (double w : t->data)
        if (!std::isfinite(w)) throw ToyDivergence(step);
  }
}

double ToySampler::sample(Rng& rng) {
  Matrix s(1, 0);
  Matrix xi(1, net_.noise_dim());
  for (auto& v : xi.a) v = rng.normal();
  const double a = net_.act(s, xi)(0, 0);
  return clip(a + rng.normal(0.0, spec_.h), -bound_, bound_);
}

std::vector<double> ToySampler::sample_many(std::size_t n, Rng& rng) {
  std::vector<double> out(n);
  for (auto& v : out) v = sample(rng);
  return out;
}

}  // namespace adac::svgd
