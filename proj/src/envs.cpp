// Classic-control dynamics follow the Gym reference implementations; the
// action mappings and reward shapes are the modified desk-task definitions
// (see README for the per-environment constants and conventions).

#include "adac/envs.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace adac::envs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double clip(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

double wrap_pi(double x) {
  while (x > kPi) x -= 2.0 * kPi;
  while (x < -kPi) x += 2.0 * kPi;
  return x;
}

class EnvBase : public Env {
 public:
  StepResult step(const std::vector<double>& action) final {
    if (done_)
      throw std::logic_error(id() + ": step() called on a finished episode");
    if (static_cast<int>(action.size()) != action_dim())
      throw std::invalid_argument(id() + ": action has " +
                                  std::to_string(action.size()) + " dims, expected " +
                                  std::to_string(action_dim()));
    double a = action[0];
    const double lo = action_low()[0], hi = action_high()[0];
    if (a < lo || a > hi) {
      if (!clip_warned_) {
        std::fprintf(stderr, "[%s] action %.6g outside [%g, %g]; clipping\n",
                     id().c_str(), a, lo, hi);
        clip_warned_ = true;
      }
      a = clip(a, lo, hi);
    }
    StepResult r = do_step(a);
    ++steps_;
    if (!r.terminated && steps_ >= max_steps()) r.truncated = true;
    done_ = r.terminated || r.truncated;
    return r;
  }

  std::vector<double> reset(std::uint64_t seed) final {
    rng_ = Rng(seed);
    steps_ = 0;
    done_ = false;
    return do_reset();
  }

 protected:
  virtual StepResult do_step(double a) = 0;
  virtual std::vector<double> do_reset() = 0;

  Rng rng_{0};
  int steps_ = 0;
  bool done_ = true;
  bool clip_warned_ = false;
};

// ---------------------------------------------------------------------------
// Modified CartPole: continuous action in [-1, 1] mapped onto the discrete
// left/right force (coin flip in the middle band), effort-penalized reward.
class CartPoleMod : public EnvBase {
 public:
  int obs_dim() const override { return 4; }
  std::vector<double> action_low() const override { return {-1.0}; }
  std::vector<double> action_high() const override { return {1.0}; }
  int max_steps() const override { return 200; }
  std::string id() const override { return "cartpole-mod"; }
  std::vector<std::pair<double, double>> obs_ranges() const override {
    return {{-2.4, 2.4}, {-3.0, 3.0}, {-0.21, 0.21}, {-3.0, 3.0}};
  }

 protected:
  std::vector<double> do_reset() override {
    for (auto& v : s_) v = rng_.uniform(-0.05, 0.05);
    return obs();
  }

  StepResult do_step(double a) override {
    double force;
    if (a < -0.5)
      force = -kForceMag;
    else if (a > 0.5)
      force = kForceMag;
    else
      force = rng_.uniform() < 0.5 ? -kForceMag : kForceMag;

    const double x = s_[0], x_dot = s_[1], theta = s_[2], theta_dot = s_[3];
    const double costh = std::cos(theta), sinth = std::sin(theta);
    const double temp =
        (force + kPoleMassLength * theta_dot * theta_dot * sinth) / kTotalMass;
    const double thetaacc =
        (kGravity * sinth - costh * temp) /
        (kLength * (4.0 / 3.0 - kMassPole * costh * costh / kTotalMass));
    const double xacc = temp - kPoleMassLength * thetaacc * costh / kTotalMass;
    s_[0] = x + kTau * x_dot;
    s_[1] = x_dot + kTau * xacc;
    s_[2] = theta + kTau * theta_dot;
    s_[3] = theta_dot + kTau * thetaacc;

    StepResult r;
    r.terminated = std::abs(s_[0]) > kXThreshold || std::abs(s_[2]) > kThetaThreshold;
    r.reward = -0.1 * std::abs(a) - 0.05 * a * a + (r.terminated ? -1.0 : 0.1);
    r.obs = obs();
    return r;
  }

 private:
  std::vector<double> obs() const { return {s_[0], s_[1], s_[2], s_[3]}; }

  static constexpr double kGravity = 9.8;
  static constexpr double kMassCart = 1.0;
  static constexpr double kMassPole = 0.1;
  static constexpr double kTotalMass = kMassCart + kMassPole;
  static constexpr double kLength = 0.5;  // half pole length
  static constexpr double kPoleMassLength = kMassPole * kLength;
  static constexpr double kForceMag = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kXThreshold = 2.4;
  static constexpr double kThetaThreshold = 12.0 * 2.0 * kPi / 360.0;

  double s_[4] = {0, 0, 0, 0};
};

// ---------------------------------------------------------------------------
// Pendulum with the sparse upright reward: 10 iff cos(theta) > 0.95 after the
// step, 0 otherwise.
class PendulumSparse : public EnvBase {
 public:
  int obs_dim() const override { return 3; }
  std::vector<double> action_low() const override { return {-kMaxTorque}; }
  std::vector<double> action_high() const override { return {kMaxTorque}; }
  int max_steps() const override { return 200; }
  std::string id() const override { return "pendulum-sparse"; }
  std::vector<std::pair<double, double>> obs_ranges() const override {
    return {{-1.0, 1.0}, {-1.0, 1.0}, {-kMaxSpeed, kMaxSpeed}};
  }

 protected:
  std::vector<double> do_reset() override {
    th_ = rng_.uniform(-kPi, kPi);
    thdot_ = rng_.uniform(-1.0, 1.0);
    return obs();
  }

  StepResult do_step(double a) override {
    const double g = 10.0, m = 1.0, l = 1.0, dt = 0.05;
    thdot_ = thdot_ + (-3.0 * g / (2.0 * l) * std::sin(th_ + kPi) +
                       3.0 / (m * l * l) * a) * dt;
    thdot_ = clip(thdot_, -kMaxSpeed, kMaxSpeed);
    th_ = th_ + thdot_ * dt;

    StepResult r;
    r.reward = std::cos(th_) > 0.95 ? 10.0 : 0.0;
    r.obs = obs();
    return r;
  }

 private:
  std::vector<double> obs() const { return {std::cos(th_), std::sin(th_), thdot_}; }

  static constexpr double kMaxTorque = 2.0;
  static constexpr double kMaxSpeed = 8.0;

  double th_ = 0.0, thdot_ = 0.0;
};

// ---------------------------------------------------------------------------
// Acrobot with the continuous action brackets mapped onto the three discrete
// torques. Book dynamics with rk4 integration, as in the Gym implementation.
class AcrobotCont : public EnvBase {
 public:
  int obs_dim() const override { return 6; }
  std::vector<double> action_low() const override { return {-1.0}; }
  std::vector<double> action_high() const override { return {1.0}; }
  int max_steps() const override { return 500; }
  std::string id() const override { return "acrobot-cont"; }
  std::vector<std::pair<double, double>> obs_ranges() const override {
    return {{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}, {-kMaxVel1, kMaxVel1}, {-kMaxVel2, kMaxVel2}};
  }

  static double discrete_torque(double a_cont) {
    if (a_cont < -1.0 / 3.0) return -1.0;  // original action 0
    if (a_cont < 1.0 / 3.0) return 0.0;    // original action 1
    return 1.0;                            // original action 2
  }

 protected:
  std::vector<double> do_reset() override {
    for (auto& v : s_) v = rng_.uniform(-0.1, 0.1);
    return obs();
  }

  StepResult do_step(double a) override {
    rk4_step(discrete_torque(a));
    s_[0] = wrap_pi(s_[0]);
    s_[1] = wrap_pi(s_[1]);
    s_[2] = clip(s_[2], -kMaxVel1, kMaxVel1);
    s_[3] = clip(s_[3], -kMaxVel2, kMaxVel2);

    StepResult r;
    r.terminated = -std::cos(s_[0]) - std::cos(s_[1] + s_[0]) > 1.0;
    r.reward = r.terminated ? 0.0 : -1.0;
    r.obs = obs();
    return r;
  }

 private:
  std::vector<double> obs() const {
    return {std::cos(s_[0]), std::sin(s_[0]), std::cos(s_[1]), std::sin(s_[1]),
            s_[2], s_[3]};
  }

  void dsdt(const double y[4], double torque, double out[4]) const {
    const double m1 = 1.0, m2 = 1.0, l1 = 1.0, lc1 = 0.5, lc2 = 0.5;
    const double I1 = 1.0, I2 = 1.0, g = 9.8;
    const double th1 = y[0], th2 = y[1], dth1 = y[2], dth2 = y[3];
    const double d1 = m1 * lc1 * lc1 +
                      m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(th2)) +
                      I1 + I2;
    const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(th2)) + I2;
    const double phi2 = m2 * lc2 * g * std::cos(th1 + th2 - kPi / 2.0);
    const double phi1 = -m2 * l1 * lc2 * dth2 * dth2 * std::sin(th2) -
                        2.0 * m2 * l1 * lc2 * dth2 * dth1 * std::sin(th2) +
                        (m1 * lc1 + m2 * l1) * g * std::cos(th1 - kPi / 2.0) + phi2;
    const double ddth2 =
        (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dth1 * dth1 * std::sin(th2) - phi2) /
        (m2 * lc2 * lc2 + I2 - d2 * d2 / d1);
    const double ddth1 = -(d2 * ddth2 + phi1) / d1;
    out[0] = dth1;
    out[1] = dth2;
    out[2] = ddth1;
    out[3] = ddth2;
  }

  void rk4_step(double torque) {
    const double dt = 0.2;
    double k1[4], k2[4], k3[4], k4[4], tmp[4];
    dsdt(s_, torque, k1);
    for (int i = 0; i < 4; ++i) tmp[i] = s_[i] + 0.5 * dt * k1[i];
    dsdt(tmp, torque, k2);
    for (int i = 0; i < 4; ++i) tmp[i] = s_[i] + 0.5 * dt * k2[i];
    dsdt(tmp, torque, k3);
    for (int i = 0; i < 4; ++i) tmp[i] = s_[i] + dt * k3[i];
    dsdt(tmp, torque, k4);
    for (int i = 0; i < 4; ++i)
      s_[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  static constexpr double kMaxVel1 = 4.0 * kPi;
  static constexpr double kMaxVel2 = 9.0 * kPi;

  double s_[4] = {0, 0, 0, 0};
};

// ---------------------------------------------------------------------------
// Continuous mountain car with r = 100 * [s' is goal] - |a|.
class MountainCarCont : public EnvBase {
 public:
  int obs_dim() const override { return 2; }
  std::vector<double> action_low() const override { return {-1.0}; }
  std::vector<double> action_high() const override { return {1.0}; }
  int max_steps() const override { return 999; }
  std::string id() const override { return "mountaincar-cont"; }
  std::vector<std::pair<double, double>> obs_ranges() const override {
    return {{kMinPos, kMaxPos}, {-kMaxSpeed, kMaxSpeed}};
  }

 protected:
  std::vector<double> do_reset() override {
    pos_ = rng_.uniform(-0.6, -0.4);
    vel_ = 0.0;
    return obs();
  }

  StepResult do_step(double a) override {
    vel_ += a * kPower - 0.0025 * std::cos(3.0 * pos_);
    vel_ = clip(vel_, -kMaxSpeed, kMaxSpeed);
    pos_ += vel_;
    pos_ = clip(pos_, kMinPos, kMaxPos);
    if (pos_ <= kMinPos && vel_ < 0.0) vel_ = 0.0;

    StepResult r;
    r.terminated = pos_ >= kGoalPos;
    r.reward = (r.terminated ? 100.0 : 0.0) - std::abs(a);
    r.obs = obs();
    return r;
  }

 private:
  std::vector<double> obs() const { return {pos_, vel_}; }

  static constexpr double kMinPos = -1.2;
  static constexpr double kMaxPos = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPos = 0.45;
  static constexpr double kPower = 0.0015;

  double pos_ = 0.0, vel_ = 0.0;
};

// ---------------------------------------------------------------------------
// Cart-pole swing-up, sparsified: base reward cos(theta), suppressed unless
// cos(theta) > 0.8, with a -0.1|a| effort penalty either way. The pole starts
// hanging down (theta = pi is down, 0 is up).
class CartPoleSwingUpSparse : public EnvBase {
 public:
  int obs_dim() const override { return 5; }
  std::vector<double> action_low() const override { return {-1.0}; }
  std::vector<double> action_high() const override { return {1.0}; }
  int max_steps() const override { return 200; }
  std::string id() const override { return "cartpole-swingup-sparse"; }
  std::vector<std::pair<double, double>> obs_ranges() const override {
    return {{-kXThreshold, kXThreshold}, {-4, 4}, {-1, 1}, {-1, 1}, {-10, 10}};
  }

 protected:
  std::vector<double> do_reset() override {
    x_ = rng_.normal(0.0, 0.2);
    xdot_ = rng_.normal(0.0, 0.2);
    th_ = kPi + rng_.normal(0.0, 0.2);
    thdot_ = rng_.normal(0.0, 0.2);
    return obs();
  }

  StepResult do_step(double a) override {
    const double force = kForceMag * a;
    const double s = std::sin(th_), c = std::cos(th_);
    const double xdot2 =
        (-2.0 * kMpl * thdot_ * thdot_ * s + 3.0 * kMp * kG * s * c + 4.0 * force -
         4.0 * kFriction * xdot_) /
        (4.0 * kMtot - 3.0 * kMp * c * c);
    const double thdot2 =
        (-3.0 * kMpl * thdot_ * thdot_ * s * c + 6.0 * kMtot * kG * s +
         6.0 * (force - kFriction * xdot_) * c) /
        (4.0 * kL * kMtot - 3.0 * kMpl * c * c);
    x_ += xdot_ * kDt;
    th_ += thdot_ * kDt;
    xdot_ += xdot2 * kDt;
    thdot_ += thdot2 * kDt;

    StepResult r;
    r.terminated = std::abs(x_) > kXThreshold;
    const double costh = std::cos(th_);
    r.reward = (costh > 0.8 ? costh : 0.0) - 0.1 * std::abs(a);
    r.obs = obs();
    return r;
  }

 private:
  std::vector<double> obs() const {
    return {x_, xdot_, std::cos(th_), std::sin(th_), thdot_};
  }

  static constexpr double kG = 9.82;
  static constexpr double kMc = 0.5;
  static constexpr double kMp = 0.5;
  static constexpr double kMtot = kMc + kMp;
  static constexpr double kL = 0.6;
  static constexpr double kMpl = kMp * kL;
  static constexpr double kForceMag = 10.0;
  static constexpr double kDt = 0.05;
  static constexpr double kFriction = 0.1;
  static constexpr double kXThreshold = 2.4;

  double x_ = 0, xdot_ = 0, th_ = kPi, thdot_ = 0;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& id) {
  if (id == "cartpole-mod") return std::make_unique<CartPoleMod>();
  if (id == "pendulum-sparse") return std::make_unique<PendulumSparse>();
  if (id == "acrobot-cont") return std::make_unique<AcrobotCont>();
  if (id == "mountaincar-cont") return std::make_unique<MountainCarCont>();
  if (id == "cartpole-swingup-sparse") return std::make_unique<CartPoleSwingUpSparse>();
  throw std::invalid_argument("unknown environment id: " + id);
}

std::vector<std::string> env_ids() {
  return {"cartpole-mod", "pendulum-sparse", "acrobot-cont", "mountaincar-cont",
          "cartpole-swingup-sparse"};
}

}  // namespace adac::envs
