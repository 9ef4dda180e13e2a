#include "adac/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace adac {

namespace {

double clip(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

void check_finite_loss(double loss, const char* what) {
  if (!std::isfinite(loss))
    throw NanError(std::string(what) + " loss is not finite: " + std::to_string(loss));
}

bool tensors_finite(const std::vector<ad::Tensor*>& ts) {
  for (const auto* t : ts)
    for (double v : t->data)
      if (!std::isfinite(v)) return false;
  return true;
}

void append_named(std::vector<std::pair<std::string, ad::Tensor*>>& out,
                  const std::string& prefix, const std::vector<ad::Tensor*>& params) {
  for (std::size_t i = 0; i < params.size(); ++i)
    out.emplace_back(prefix + ".t" + std::to_string(i), params[i]);
}

// One mean-squared-error regression step of a critic towards fixed targets.
// Both ADAC critics go through this same path so that, with identical
// parameters and r_in = 0, their updates stay bit-identical.
double critic_mse_step(nn::CriticNet& critic, nn::Adam& opt, const Matrix& s,
                       const Matrix& a, const Matrix& y) {
  critic.zero_grad();
  ad::Graph g;
  ad::Var q = critic.forward(g, g.constant(s), g.constant(a));
  ad::Var loss = g.mean(g.squared_diff(q, g.constant(y)));
  const double value = loss.value()(0, 0);
  g.backward(loss);
  opt.step();
  return value;
}

// Deterministic-policy-gradient step through a frozen critic:
// minimize -mean(Q(s, f(s, 0))).
void dpg_step(nn::PolicyNet& policy, nn::CriticNet& critic, nn::Adam& opt,
              const Matrix& s) {
  nn::FreezeGuard freeze(critic.params());
  policy.zero_grad();
  ad::Graph g;
  ad::Var a = policy.forward_det(g, g.constant(s));
  ad::Var q = critic.forward(g, g.constant(s), a);
  g.backward(g.scale(g.mean(q), -1.0));
  opt.step();
}

// Amortized-SVGD step of the behavior stream through a frozen critic.
void svgd_step(nn::PolicyNet& policy, nn::CriticNet& critic, nn::Adam& opt,
               const Matrix& s, const svgd::SvgdConfig& cfg, Rng& rng) {
  nn::FreezeGuard freeze(critic.params());
  policy.zero_grad();
  svgd::policy_gradient(policy, critic, s, cfg, rng);
  nn::negate_grads(policy.params());
  opt.step();
}

Matrix head_rows(const Matrix& m, std::size_t n) {
  if (n == 0 || n >= m.rows) return m;
  Matrix out(n, m.cols);
  std::copy(m.a.begin(), m.a.begin() + n * m.cols, out.a.begin());
  return out;
}

struct EnvSpec {
  int obs_dim;
  int action_dim;
  std::vector<double> low, high;

  explicit EnvSpec(const envs::Env& env)
      : obs_dim(env.obs_dim()),
        action_dim(env.action_dim()),
        low(env.action_low()),
        high(env.action_high()) {}
};

// ---------------------------------------------------------------------------

class DdpgAgent : public Agent {
 public:
  DdpgAgent(const EnvSpec& es, const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        es_(es),
        actor_(es.obs_dim, es.action_dim, 0, cfg.hidden, es.low, es.high,
               *make_rng(seed, 10)),
        actor_target_(es.obs_dim, es.action_dim, 0, cfg.hidden, es.low, es.high,
                      *make_rng(seed, 11)),
        critic_(es.obs_dim, es.action_dim, cfg.hidden, *make_rng(seed, 12)),
        critic_target_(es.obs_dim, es.action_dim, cfg.hidden, *make_rng(seed, 13)),
        opt_actor_(actor_.params(), cfg.lr_policy),
        opt_critic_(critic_.params(), cfg.lr_critic) {
    nn::copy_params(actor_target_.params(), actor_.params());
    nn::copy_params(critic_target_.params(), critic_.params());
  }

  std::vector<double> explore_action(const std::vector<double>& s, Rng& rng) override {
    Matrix a = actor_.act_det(Matrix::from_row(s));
    std::vector<double> out(es_.action_dim);
    for (int i = 0; i < es_.action_dim; ++i)
      out[i] = clip(a(0, i) + rng.normal(0.0, cfg_.explore_sigma), es_.low[i], es_.high[i]);
    return out;
  }

  std::vector<double> eval_action(const std::vector<double>& s) override {
    Matrix a = actor_.act_det(Matrix::from_row(s));
    return std::vector<double>(a.a.begin(), a.a.end());
  }

  void update(const ReplayBuffer& buffer, Rng& rng) override {
    Batch b;
    buffer.sample(cfg_.batch, rng, &b);
    Matrix a2 = actor_target_.act_det(b.s2);
    Matrix q2 = critic_target_.value(b.s2, a2);
    Matrix y(cfg_.batch, 1);
    for (int i = 0; i < cfg_.batch; ++i)
      y(i, 0) = b.r[i] + cfg_.gamma * b.not_done[i] * q2(i, 0);

    loss_c_ = critic_mse_step(critic_, opt_critic_, b.s, b.a, y);
    check_finite_loss(loss_c_, "ddpg critic");
    dpg_step(actor_, critic_, opt_actor_, b.s);

    nn::soft_update(actor_target_.params(), actor_.params(), cfg_.tau);
    nn::soft_update(critic_target_.params(), critic_.params(), cfg_.tau);
  }

  double last_loss_tar() const override { return loss_c_; }
  bool params_finite() override {
    return tensors_finite(actor_.params()) && tensors_finite(critic_.params());
  }

  std::vector<std::pair<std::string, ad::Tensor*>> named_tensors() override {
    std::vector<std::pair<std::string, ad::Tensor*>> out;
    append_named(out, "actor", actor_.params());
    append_named(out, "actor_target", actor_target_.params());
    append_named(out, "critic", critic_.params());
    append_named(out, "critic_target", critic_target_.params());
    return out;
  }

 private:
  static std::unique_ptr<Rng> make_rng(std::uint64_t seed, std::uint64_t stream) {
    return std::make_unique<Rng>(seed, stream);
  }

  AgentConfig cfg_;
  EnvSpec es_;
  nn::PolicyNet actor_, actor_target_;
  nn::CriticNet critic_, critic_target_;
  nn::Adam opt_actor_, opt_critic_;
  double loss_c_ = 0.0;
};

// ---------------------------------------------------------------------------

class Td3Agent : public Agent {
 public:
  Td3Agent(const EnvSpec& es, const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        es_(es),
        actor_(es.obs_dim, es.action_dim, 0, cfg.hidden, es.low, es.high, *rng_for(seed, 20)),
        actor_target_(es.obs_dim, es.action_dim, 0, cfg.hidden, es.low, es.high,
                      *rng_for(seed, 21)),
        q1_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 22)),
        q2_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 23)),
        q1_target_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 24)),
        q2_target_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 25)),
        opt_actor_(actor_.params(), cfg.lr_policy),
        opt_q1_(q1_.params(), cfg.lr_critic),
        opt_q2_(q2_.params(), cfg.lr_critic) {
    nn::copy_params(actor_target_.params(), actor_.params());
    nn::copy_params(q1_target_.params(), q1_.params());
    nn::copy_params(q2_target_.params(), q2_.params());
  }

  std::vector<double> explore_action(const std::vector<double>& s, Rng& rng) override {
    Matrix a = actor_.act_det(Matrix::from_row(s));
    std::vector<double> out(es_.action_dim);
    for (int i = 0; i < es_.action_dim; ++i)
      out[i] = clip(a(0, i) + rng.normal(0.0, cfg_.explore_sigma), es_.low[i], es_.high[i]);
    return out;
  }

  std::vector<double> eval_action(const std::vector<double>& s) override {
    Matrix a = actor_.act_det(Matrix::from_row(s));
    return std::vector<double>(a.a.begin(), a.a.end());
  }

  void update(const ReplayBuffer& buffer, Rng& rng) override {
    Batch b;
    buffer.sample(cfg_.batch, rng, &b);
    Matrix a2 = actor_target_.act_det(b.s2);
    for (int i = 0; i < cfg_.batch; ++i) {
      const double eps =
          clip(rng.normal(0.0, cfg_.smoothing_sigma), -cfg_.noise_clip, cfg_.noise_clip);
      for (int c = 0; c < es_.action_dim; ++c)
        a2(i, c) = clip(a2(i, c) + eps, es_.low[c], es_.high[c]);
    }
    Matrix q1v = q1_target_.value(b.s2, a2);
    Matrix q2v = q2_target_.value(b.s2, a2);
    Matrix y(cfg_.batch, 1);
    for (int i = 0; i < cfg_.batch; ++i)
      y(i, 0) = b.r[i] + cfg_.gamma * b.not_done[i] * std::min(q1v(i, 0), q2v(i, 0));

    const double l1 = critic_mse_step(q1_, opt_q1_, b.s, b.a, y);
    const double l2 = critic_mse_step(q2_, opt_q2_, b.s, b.a, y);
    loss_c_ = 0.5 * (l1 + l2);
    check_finite_loss(loss_c_, "td3 critic");

    if (update_count_ % cfg_.policy_delay == cfg_.policy_delay - 1) {
      dpg_step(actor_, q1_, opt_actor_, b.s);
      nn::soft_update(actor_target_.params(), actor_.params(), cfg_.tau);
      nn::soft_update(q1_target_.params(), q1_.params(), cfg_.tau);
      nn::soft_update(q2_target_.params(), q2_.params(), cfg_.tau);
    }
    ++update_count_;
  }

  double last_loss_tar() const override { return loss_c_; }
  bool params_finite() override {
    return tensors_finite(actor_.params()) && tensors_finite(q1_.params()) &&
           tensors_finite(q2_.params());
  }

  std::vector<std::pair<std::string, ad::Tensor*>> named_tensors() override {
    std::vector<std::pair<std::string, ad::Tensor*>> out;
    append_named(out, "actor", actor_.params());
    append_named(out, "actor_target", actor_target_.params());
    append_named(out, "critic1", q1_.params());
    append_named(out, "critic2", q2_.params());
    append_named(out, "critic1_target", q1_target_.params());
    append_named(out, "critic2_target", q2_target_.params());
    return out;
  }

 private:
  static std::unique_ptr<Rng> rng_for(std::uint64_t seed, std::uint64_t stream) {
    return std::make_unique<Rng>(seed, stream);
  }

  AgentConfig cfg_;
  EnvSpec es_;
  nn::PolicyNet actor_, actor_target_;
  nn::CriticNet q1_, q2_, q1_target_, q2_target_;
  nn::Adam opt_actor_, opt_q1_, opt_q2_;
  long update_count_ = 0;
  double loss_c_ = 0.0;
};

// ---------------------------------------------------------------------------
// ADAC with the DDPG base (Algorithm 2). One shared policy network carries
// pi = f(s, 0) and mu = f(s, xi); the split_policy flag switches to the
// two-copy ablation used in the bias experiment.

class AdacDdpgAgent : public Agent {
 public:
  AdacDdpgAgent(const EnvSpec& es, const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        es_(es),
        spec_(svgd::KernelSpec::for_dims(es.action_dim, cfg.particles)),
        policy_pi_(es.obs_dim, es.action_dim, cfg.noise_dim, cfg.hidden, es.low,
                   es.high, *rng_for(seed, 30)),
        policy_mu_split_(),
        policy_target_(es.obs_dim, es.action_dim, cfg.noise_dim, cfg.hidden, es.low,
                       es.high, *rng_for(seed, 31)),
        critic_tar_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 32)),
        critic_beh_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 33)),
        critic_tar_target_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 34)),
        critic_beh_target_(es.obs_dim, es.action_dim, cfg.hidden, *rng_for(seed, 35)),
        beta_(cfg.beta_start) {
    if (cfg.split_policy)
      policy_mu_split_ = std::make_unique<nn::PolicyNet>(
          es.obs_dim, es.action_dim, cfg.noise_dim, cfg.hidden, es.low, es.high,
          *rng_for(seed, 36));
    nn::copy_params(policy_target_.params(), policy_pi_.params());
    nn::copy_params(critic_tar_target_.params(), critic_tar_.params());
    nn::copy_params(critic_beh_target_.params(), critic_beh_.params());
    if (cfg.split_policy)
      nn::copy_params(policy_mu_split_->params(), policy_pi_.params());
    opt_pi_ = nn::Adam(policy_pi_.params(), cfg.lr_policy);
    opt_mu_ = nn::Adam(mu_net().params(), cfg.lr_behavior);
    opt_ctar_ = nn::Adam(critic_tar_.params(), cfg.lr_critic);
    opt_cbeh_ = nn::Adam(critic_beh_.params(), cfg.lr_critic);
  }

  nn::PolicyNet& mu_net() {
    return cfg_.split_policy ? *policy_mu_split_ : policy_pi_;
  }

  std::vector<double> explore_action(const std::vector<double>& s, Rng& rng) override {
    return svgd::sample_behavior_action(mu_net(), s, spec_, rng);
  }

  std::vector<double> eval_action(const std::vector<double>& s) override {
    Matrix a = policy_pi_.act_det(Matrix::from_row(s));
    return std::vector<double>(a.a.begin(), a.a.end());
  }

  void set_progress(double frac) override {
    frac = clip(frac, 0.0, 1.0);
    beta_ = cfg_.beta_start + (cfg_.beta_end - cfg_.beta_start) * frac;
  }
  double beta() const override { return beta_; }

  void update(const ReplayBuffer& buffer, Rng& rng) override {
    Batch b;
    buffer.sample(cfg_.batch, rng, &b);

    // Critic bounding: both bootstrap actions come from the target policy
    // network at xi = 0, never from mu.
    Matrix a2 = policy_target_.act_det(b.s2);
    Matrix qt = critic_tar_target_.value(b.s2, a2);
    Matrix qb = critic_beh_target_.value(b.s2, a2);
    Matrix y_tar(cfg_.batch, 1), y_beh(cfg_.batch, 1);
    for (int i = 0; i < cfg_.batch; ++i) {
      y_tar(i, 0) = b.r[i] + cfg_.gamma * b.not_done[i] * qt(i, 0);
      y_beh(i, 0) = b.r[i] + b.r_in[i] + cfg_.gamma * b.not_done[i] * qb(i, 0);
    }
    loss_tar_ = critic_mse_step(critic_tar_, opt_ctar_, b.s, b.a, y_tar);
    loss_beh_ = critic_mse_step(critic_beh_, opt_cbeh_, b.s, b.a, y_beh);
    check_finite_loss(loss_tar_, "adac target critic");
    check_finite_loss(loss_beh_, "adac behavior critic");

    dpg_step(policy_pi_, critic_tar_, opt_pi_, b.s);
    const Matrix svgd_states =
        head_rows(b.s, static_cast<std::size_t>(cfg_.svgd_states));
    svgd_step(mu_net(), critic_beh_, opt_mu_, svgd_states,
              {cfg_.particles, beta_}, rng);

    nn::soft_update(policy_target_.params(), policy_pi_.params(), cfg_.tau);
    nn::soft_update(critic_tar_target_.params(), critic_tar_.params(), cfg_.tau);
    nn::soft_update(critic_beh_target_.params(), critic_beh_.params(), cfg_.tau);
  }

  double policy_bias(const Matrix& states, int n_samples, Rng& rng) override {
    return adac::policy_bias(mu_net(), policy_pi_, states, n_samples, rng);
  }

  double last_loss_tar() const override { return loss_tar_; }
  double last_loss_beh() const override { return loss_beh_; }

  bool params_finite() override {
    return tensors_finite(policy_pi_.params()) && tensors_finite(critic_tar_.params()) &&
           tensors_finite(critic_beh_.params()) &&
           (!cfg_.split_policy || tensors_finite(policy_mu_split_->params()));
  }

  std::vector<std::pair<std::string, ad::Tensor*>> named_tensors() override {
    std::vector<std::pair<std::string, ad::Tensor*>> out;
    append_named(out, "policy", policy_pi_.params());
    if (cfg_.split_policy) append_named(out, "policy_mu", policy_mu_split_->params());
    append_named(out, "policy_target", policy_target_.params());
    append_named(out, "critic_tar", critic_tar_.params());
    append_named(out, "critic_beh", critic_beh_.params());
    append_named(out, "critic_tar_target", critic_tar_target_.params());
    append_named(out, "critic_beh_target", critic_beh_target_.params());
    return out;
  }

 private:
  static std::unique_ptr<Rng> rng_for(std::uint64_t seed, std::uint64_t stream) {
    return std::make_unique<Rng>(seed, stream);
  }

  AgentConfig cfg_;
  EnvSpec es_;
  svgd::KernelSpec spec_;
  nn::PolicyNet policy_pi_;
  std::unique_ptr<nn::PolicyNet> policy_mu_split_;
  nn::PolicyNet policy_target_;
  nn::CriticNet critic_tar_, critic_beh_, critic_tar_target_, critic_beh_target_;
  nn::Adam opt_pi_, opt_mu_, opt_ctar_, opt_cbeh_;
  double beta_;
  double loss_tar_ = 0.0, loss_beh_ = 0.0;
};

// ---------------------------------------------------------------------------
// ADAC with the TD3 base (Algorithm 3): twin critics for both reward streams,
// smoothed bootstrap actions, delayed policy and target updates.

class AdacTd3Agent : public Agent {
 public:
  AdacTd3Agent(const EnvSpec& es, const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        es_(es),
        spec_(svgd::KernelSpec::for_dims(es.action_dim, cfg.particles)),
        policy_pi_(es.obs_dim, es.action_dim, cfg.noise_dim, cfg.hidden, es.low,
                   es.high, *rng_for(seed, 40)),
        policy_target_(es.obs_dim, es.action_dim, cfg.noise_dim, cfg.hidden, es.low,
                       es.high, *rng_for(seed, 41)),
        beta_(cfg.beta_start) {
    auto mk_critic = [&](std::uint64_t stream) {
      return std::make_unique<nn::CriticNet>(es.obs_dim, es.action_dim, cfg.hidden,
                                             *rng_for(seed, stream));
    };
    for (int k = 0; k < 2; ++k) {
      tar_[k] = mk_critic(42 + k);
      beh_[k] = mk_critic(44 + k);
      tar_t_[k] = mk_critic(46 + k);
      beh_t_[k] = mk_critic(48 + k);
      nn::copy_params(tar_t_[k]->params(), tar_[k]->params());
      nn::copy_params(beh_t_[k]->params(), beh_[k]->params());
      opt_tar_[k] = nn::Adam(tar_[k]->params(), cfg.lr_critic);
      opt_beh_[k] = nn::Adam(beh_[k]->params(), cfg.lr_critic);
    }
    if (cfg.split_policy)
      policy_mu_split_ = std::make_unique<nn::PolicyNet>(
          es.obs_dim, es.action_dim, cfg.noise_dim, cfg.hidden, es.low, es.high,
          *rng_for(seed, 50));
    nn::copy_params(policy_target_.params(), policy_pi_.params());
    if (cfg.split_policy)
      nn::copy_params(policy_mu_split_->params(), policy_pi_.params());
    opt_pi_ = nn::Adam(policy_pi_.params(), cfg.lr_policy);
    opt_mu_ = nn::Adam(mu_net().params(), cfg.lr_behavior);
  }

  nn::PolicyNet& mu_net() {
    return cfg_.split_policy ? *policy_mu_split_ : policy_pi_;
  }

  std::vector<double> explore_action(const std::vector<double>& s, Rng& rng) override {
    return svgd::sample_behavior_action(mu_net(), s, spec_, rng);
  }

  std::vector<double> eval_action(const std::vector<double>& s) override {
    Matrix a = policy_pi_.act_det(Matrix::from_row(s));
    return std::vector<double>(a.a.begin(), a.a.end());
  }

  void set_progress(double frac) override {
    frac = clip(frac, 0.0, 1.0);
    beta_ = cfg_.beta_start + (cfg_.beta_end - cfg_.beta_start) * frac;
  }
  double beta() const override { return beta_; }

  void update(const ReplayBuffer& buffer, Rng& rng) override {
    Batch b;
    buffer.sample(cfg_.batch, rng, &b);

    Matrix a2 = policy_target_.act_det(b.s2);
    for (int i = 0; i < cfg_.batch; ++i) {
      const double eps =
          clip(rng.normal(0.0, cfg_.smoothing_sigma), -cfg_.noise_clip, cfg_.noise_clip);
      for (int c = 0; c < es_.action_dim; ++c)
        a2(i, c) = clip(a2(i, c) + eps, es_.low[c], es_.high[c]);
    }
    Matrix qt0 = tar_t_[0]->value(b.s2, a2);
    Matrix qt1 = tar_t_[1]->value(b.s2, a2);
    Matrix qb0 = beh_t_[0]->value(b.s2, a2);
    Matrix qb1 = beh_t_[1]->value(b.s2, a2);
    Matrix y_tar(cfg_.batch, 1), y_beh(cfg_.batch, 1);
    for (int i = 0; i < cfg_.batch; ++i) {
      y_tar(i, 0) = b.r[i] +
                    cfg_.gamma * b.not_done[i] * std::min(qt0(i, 0), qt1(i, 0));
      y_beh(i, 0) = b.r[i] + b.r_in[i] +
                    cfg_.gamma * b.not_done[i] * std::min(qb0(i, 0), qb1(i, 0));
    }
    double lt = 0.0, lb = 0.0;
    for (int k = 0; k < 2; ++k) {
      lt += critic_mse_step(*tar_[k], opt_tar_[k], b.s, b.a, y_tar);
      lb += critic_mse_step(*beh_[k], opt_beh_[k], b.s, b.a, y_beh);
    }
    loss_tar_ = 0.5 * lt;
    loss_beh_ = 0.5 * lb;
    check_finite_loss(loss_tar_, "adac-td3 target critic");
    check_finite_loss(loss_beh_, "adac-td3 behavior critic");

    if (update_count_ % cfg_.policy_delay == cfg_.policy_delay - 1) {
      dpg_step(policy_pi_, *tar_[0], opt_pi_, b.s);
      const Matrix svgd_states =
          head_rows(b.s, static_cast<std::size_t>(cfg_.svgd_states));
      svgd_step(mu_net(), *beh_[0], opt_mu_, svgd_states, {cfg_.particles, beta_}, rng);

      nn::soft_update(policy_target_.params(), policy_pi_.params(), cfg_.tau);
      for (int k = 0; k < 2; ++k) {
        nn::soft_update(tar_t_[k]->params(), tar_[k]->params(), cfg_.tau);
        nn::soft_update(beh_t_[k]->params(), beh_[k]->params(), cfg_.tau);
      }
    }
    ++update_count_;
  }

  double policy_bias(const Matrix& states, int n_samples, Rng& rng) override {
    return adac::policy_bias(mu_net(), policy_pi_, states, n_samples, rng);
  }

  double last_loss_tar() const override { return loss_tar_; }
  double last_loss_beh() const override { return loss_beh_; }

  bool params_finite() override {
    bool ok = tensors_finite(policy_pi_.params());
    for (int k = 0; k < 2; ++k)
      ok = ok && tensors_finite(tar_[k]->params()) && tensors_finite(beh_[k]->params());
    if (cfg_.split_policy) ok = ok && tensors_finite(policy_mu_split_->params());
    return ok;
  }

  std::vector<std::pair<std::string, ad::Tensor*>> named_tensors() override {
    std::vector<std::pair<std::string, ad::Tensor*>> out;
    append_named(out, "policy", policy_pi_.params());
    if (cfg_.split_policy) append_named(out, "policy_mu", policy_mu_split_->params());
    append_named(out, "policy_target", policy_target_.params());
    for (int k = 0; k < 2; ++k) {
      const std::string suffix = std::to_string(k + 1);
      append_named(out, "critic_tar" + suffix, tar_[k]->params());
      append_named(out, "critic_beh" + suffix, beh_[k]->params());
      append_named(out, "critic_tar" + suffix + "_target", tar_t_[k]->params());
      append_named(out, "critic_beh" + suffix + "_target", beh_t_[k]->params());
    }
    return out;
  }

 private:
  static std::unique_ptr<Rng> rng_for(std::uint64_t seed, std::uint64_t stream) {
    return std::make_unique<Rng>(seed, stream);
  }

  AgentConfig cfg_;
  EnvSpec es_;
  svgd::KernelSpec spec_;
  nn::PolicyNet policy_pi_;
  std::unique_ptr<nn::PolicyNet> policy_mu_split_;
  nn::PolicyNet policy_target_;
  std::unique_ptr<nn::CriticNet> tar_[2], beh_[2], tar_t_[2], beh_t_[2];
  nn::Adam opt_pi_, opt_mu_, opt_tar_[2], opt_beh_[2];
  long update_count_ = 0;
  double beta_;
  double loss_tar_ = 0.0, loss_beh_ = 0.0;
};

}  // namespace

AgentConfig AgentConfig::defaults_for(const std::string& kind) {
  AgentConfig cfg;
  if (kind == "ddpg") {
    cfg.lr_critic = 1e-3;
    cfg.lr_policy = 1e-4;
  } else if (kind == "td3") {
    cfg.lr_critic = 3e-4;
    cfg.lr_policy = 3e-4;
  } else if (kind == "adac-ddpg") {
    cfg.lr_critic = 1e-3;
    cfg.lr_policy = 1e-4;
    cfg.lr_behavior = 1e-4;
  } else if (kind == "adac-td3") {
    cfg.lr_critic = 3e-4;
    cfg.lr_policy = 1e-3;
    cfg.lr_behavior = 3e-4;
  } else {
    throw std::invalid_argument("unknown agent kind: " + kind);
  }
  return cfg;
}

std::unique_ptr<Agent> make_agent(const std::string& kind, const envs::Env& env,
                                  const AgentConfig& cfg, std::uint64_t seed) {
  EnvSpec es(env);
  if (kind == "ddpg") return std::make_unique<DdpgAgent>(es, cfg, seed);
  if (kind == "td3") return std::make_unique<Td3Agent>(es, cfg, seed);
  if (kind == "adac-ddpg") return std::make_unique<AdacDdpgAgent>(es, cfg, seed);
  if (kind == "adac-td3") return std::make_unique<AdacTd3Agent>(es, cfg, seed);
  throw std::invalid_argument("unknown agent kind: " + kind);
}

std::vector<std::string> agent_kinds() {
  return {"ddpg", "td3", "adac-ddpg", "adac-td3"};
}

double policy_bias(nn::PolicyNet& sampler, nn::PolicyNet& deterministic,
                   const Matrix& states, int n_samples, Rng& rng) {
  if (states.rows == 0 || n_samples < 1) return 0.0;
  const std::size_t S = states.rows;
  const int d = sampler.action_dim();
  Matrix acc(S, d);
  Matrix xi(S, sampler.noise_dim());
  for (int k = 0; k < n_samples; ++k) {
    for (auto& v : xi.a) v = rng.normal();
    Matrix a = sampler.act(states, xi);
    for (std::size_t q = 0; q < acc.size(); ++q) acc.a[q] += a.a[q];
  }
  const Matrix det = deterministic.act_det(states);
  double bias = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    double sq = 0.0;
    for (int c = 0; c < d; ++c) {
      const double diff = acc(s, c) / n_samples - det(s, c);
      sq += diff * diff;
    }
    bias += std::sqrt(sq);
  }
  return bias / static_cast<double>(S);
}

}  // namespace adac
