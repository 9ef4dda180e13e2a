#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "adac/config.hpp"
#include "adac/envs.hpp"
#include "adac/intrinsic.hpp"
#include "adac/mdpcheck.hpp"
#include "adac/runner.hpp"
#include "adac/svgd.hpp"

namespace fs = std::filesystem;
using namespace adac;

namespace {

struct SeedOutcome {
  RunResult result;
  std::string error;
};

std::unique_ptr<IntrinsicReward> make_intrinsic(const RunConfig& cfg,
                                                const envs::Env& env) {
  if (cfg.agent_cfg.intrinsic)
    return std::make_unique<CountIntrinsic>(env.obs_ranges(), cfg.agent_cfg.kappa);
  return std::make_unique<ZeroIntrinsic>();
}

SeedOutcome run_one_seed(const RunConfig& cfg, std::uint64_t seed,
                         bool split_override, bool use_split) {
  SeedOutcome out;
  try {
    AgentConfig acfg = cfg.agent_cfg;
    if (split_override) acfg.split_policy = use_split;
    auto env = envs::make_env(cfg.env);
    auto eval_env = envs::make_env(cfg.env);
    auto agent = make_agent(cfg.agent, *env, acfg, seed);
    auto intrinsic = make_intrinsic(cfg, *env);
    out.result = train(*env, *eval_env, *agent, *intrinsic, acfg, cfg.total_steps, seed);
    if (!out.result.aborted) {
      fs::path dir(cfg.out_dir);
      std::string stem = cfg.name + (split_override ? (use_split ? "-split" : "-shared") : "");
      write_runlog_csv((dir / (stem + "-seed" + std::to_string(seed) + ".csv")).string(),
                       out.result.rows);
      std::vector<std::pair<std::string, const ad::Tensor*>> named;
      for (auto& [n, t] : agent->named_tensors()) named.emplace_back(n, t);
      nn::save_checkpoint(
          (dir / (stem + "-seed" + std::to_string(seed) + ".ckpt")).string(), named);
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

// Runs all seeds, optionally as parallel workers; each seed writes its own
// files so workers never share output streams.
std::vector<SeedOutcome> run_all_seeds(const RunConfig& cfg, bool split_override,
                                       bool use_split) {
  std::vector<SeedOutcome> outcomes(cfg.seeds.size());
  int workers = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, cfg.seeds.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfg.seeds.size()) break;
      outcomes[i] = run_one_seed(cfg, cfg.seeds[i], split_override, use_split);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return outcomes;
}

int report_train_outcomes(const RunConfig& cfg, const std::vector<SeedOutcome>& outcomes) {
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].error.empty()) {
      std::cerr << "seed " << cfg.seeds[i] << ": " << outcomes[i].error << "\n";
      return 2;
    }
    if (outcomes[i].result.aborted) {
      std::cerr << "seed " << cfg.seeds[i] << " aborted: "
                << outcomes[i].result.abort_reason << "\n";
      return 3;
    }
  }
  double mean = 0.0;
  for (const auto& o : outcomes) mean += o.result.final_eval;
  mean /= outcomes.size();
  double var = 0.0;
  for (const auto& o : outcomes) {
    const double d = o.result.final_eval - mean;
    var += d * d;
  }
  const double sd = outcomes.size() > 1 ? std::sqrt(var / (outcomes.size() - 1)) : 0.0;
  std::printf("%s: final eval return %.4f +/- %.4f over %zu seeds\n", cfg.name.c_str(),
              mean, sd, outcomes.size());
  return 0;
}

int cmd_train(const std::string& config_path) {
  RunConfig cfg = load_run_config(config_path);
  fs::create_directories(cfg.out_dir);
  auto outcomes = run_all_seeds(cfg, false, false);
  return report_train_outcomes(cfg, outcomes);
}

int cmd_bias_ablation(const std::string& config_path) {
  RunConfig cfg = load_run_config(config_path);
  if (cfg.agent != "adac-ddpg" && cfg.agent != "adac-td3")
    throw ConfigError("bias-ablation requires an adac-* agent");
  fs::create_directories(cfg.out_dir);

  auto shared = run_all_seeds(cfg, true, false);
  auto split = run_all_seeds(cfg, true, true);
  int rc = report_train_outcomes(cfg, shared);
  if (rc != 0) return rc;
  rc = report_train_outcomes(cfg, split);
  if (rc != 0) return rc;

  const fs::path out = fs::path(cfg.out_dir) / (cfg.name + "-bias-ablation.csv");
  std::ofstream f(out);
  f << "seed,step,bias_shared,bias_split\n";
  int shared_lower = 0;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const auto& rs = shared[i].result.rows;
    const auto& rp = split[i].result.rows;
    double ms = 0.0, mp = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < std::min(rs.size(), rp.size()); ++k) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%llu,%ld,%.10g,%.10g\n",
                    static_cast<unsigned long long>(cfg.seeds[i]), rs[k].step,
                    rs[k].policy_bias, rp[k].policy_bias);
      f << buf;
      if (rs[k].step > 0) {
        ms += rs[k].policy_bias;
        mp += rp[k].policy_bias;
        ++n;
      }
    }
    if (n > 0 && ms / n < mp / n) ++shared_lower;
    std::printf("seed %llu: mean bias shared %.6f vs split %.6f\n",
                static_cast<unsigned long long>(cfg.seeds[i]), n ? ms / n : 0.0,
                n ? mp / n : 0.0);
  }
  std::printf("shared-network bias lower in %d of %zu seeds\n", shared_lower,
              cfg.seeds.size());
  return 0;
}

int cmd_svgd_toy(const std::string& target_id, double beta, long steps, int particles,
                 long n_samples, double lr, std::uint64_t seed,
                 const std::string& out_dir) {
  svgd::ToyTarget target = svgd::toy_target(target_id);  // throws on unknown id
  fs::create_directories(out_dir);

  svgd::ToySampler sampler(target, beta, steps, particles, lr, seed);
  Rng rng(seed, 9001);
  std::vector<double> samples = sampler.sample_many(n_samples, rng);

  {
    std::ofstream f(fs::path(out_dir) / "samples.csv");
    f << "sample\n";
    char buf[48];
    for (double s : samples) {
      std::snprintf(buf, sizeof buf, "%.10g\n", s);
      f << buf;
    }
  }
  {
    // Normalized target density on a plotting grid.
    const int n = 601;
    const double lo = -6.0, hi = 6.0;
    std::vector<double> dens(n);
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = lo + (hi - lo) * i / (n - 1);
      dens[i] = std::exp(target.log_density(x));
      mass += dens[i] * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    }
    mass *= (hi - lo) / (n - 1);
    std::ofstream f(fs::path(out_dir) / "density.csv");
    f << "x,density\n";
    char buf[64];
    for (int i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", lo + (hi - lo) * i / (n - 1),
                    dens[i] / mass);
      f << buf;
    }
  }

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= samples.size();
  double var = 0.0, left = 0.0;
  for (double s : samples) {
    var += (s - mean) * (s - mean);
    if (s < 0.0) left += 1.0;
  }
  const double sd = std::sqrt(var / samples.size());
  const double mass_left = left / samples.size();
  std::printf("target=%s beta=%.3g samples=%zu mean=%.4f std=%.4f "
              "mass_left=%.4f mass_right=%.4f max_mode_mass=%.4f\n",
              target.name.c_str(), beta, samples.size(), mean, sd, mass_left,
              1.0 - mass_left, std::max(mass_left, 1.0 - mass_left));
  return 0;
}

int cmd_verify(long instances, std::uint64_t seed, double tol,
               const std::string& construction, const std::string& out_path,
               bool inject_bad_rprime) {
  if (construction != "fixed-point" && construction != "arbitrary")
    throw ConfigError("--construction must be fixed-point or arbitrary");
  std::ofstream f(out_path);
  if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
  f << "instance,S,A,gamma,stability_printed,stability_proof,effectiveness,"
       "lemma1_mu,lemma1_pi,holds\n";

  Rng rng(seed, 11);
  long violations = 0, printed_violations = 0;
  double worst_lemma_mu = 0.0;
  for (long i = 0; i < instances; ++i) {
    mdp::FiniteMdp m = mdp::random_mdp(rng);
    if (inject_bad_rprime && i == 0) m.Rprime.a[0] = m.R.a[0] - 1.0;
    mdp::QTable q_seed;
    if (construction == "fixed-point") {
      mdp::policy_iteration(m.R, m, &q_seed);
    } else {
      q_seed = Matrix(m.S, m.A);
      for (auto& v : q_seed.a) v = rng.uniform(-1.0, 1.0);
    }
    const mdp::Theorem1Report rep = mdp::verify_theorem1(m, q_seed);
    const auto lem_mu = mdp::verify_lemma1(m, q_seed, mdp::Lemma1Reading::kMu);
    const auto lem_pi = mdp::verify_lemma1(m, q_seed, mdp::Lemma1Reading::kPi);
    const bool holds = rep.holds(tol);
    if (!holds) ++violations;
    if (rep.stability_printed < -tol) ++printed_violations;
    worst_lemma_mu = std::max(worst_lemma_mu, lem_mu.max_abs_discrepancy);
    char buf[320];
    std::snprintf(buf, sizeof buf, "%ld,%d,%d,%.10g,%.12g,%.12g,%.12g,%.12g,%.12g,%d\n",
                  i, m.S, m.A, m.gamma, rep.stability_printed, rep.stability_proof,
                  rep.effectiveness, lem_mu.max_abs_discrepancy,
                  lem_pi.max_abs_discrepancy, holds ? 1 : 0);
    f << buf;
  }
  std::printf("%ld instances (%s construction): %ld violations at tol %.3g; "
              "printed-form stability violated on %ld; max lemma1 discrepancy "
              "(mu reading) %.3e\n",
              instances, construction.c_str(), violations, tol, printed_violations,
              worst_lemma_mu);
  return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ADAC experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* train_cmd = app.add_subcommand("train", "run a training experiment");
  train_cmd->add_option("--config", config_path, "JSON run config")->required();

  std::string ablation_config;
  auto* bias_cmd = app.add_subcommand(
      "bias-ablation", "shared vs split policy network bias comparison");
  bias_cmd->add_option("--config", ablation_config, "JSON run config")->required();

  std::string toy_target = "bimodal";
  double toy_beta = 1.0, toy_lr = 1e-3;
  long toy_steps = 4000, toy_samples = 100000;
  int toy_particles = 32;
  std::uint64_t toy_seed = 0;
  std::string toy_out = "toy-out";
  auto* toy_cmd = app.add_subcommand("svgd-toy", "1-D amortized SVGD demo");
  toy_cmd->add_option("--target", toy_target, "unimodal | bimodal");
  toy_cmd->add_option("--beta", toy_beta, "entropy coefficient");
  toy_cmd->add_option("--steps", toy_steps, "training steps");
  toy_cmd->add_option("--particles", toy_particles, "particle count K");
  toy_cmd->add_option("--samples", toy_samples, "samples to draw after fitting");
  toy_cmd->add_option("--lr", toy_lr, "Adam learning rate");
  toy_cmd->add_option("--seed", toy_seed, "seed");
  toy_cmd->add_option("--out", toy_out, "output directory");

  long v_instances = 1000;
  std::uint64_t v_seed = 0;
  double v_tol = 1e-9;
  std::string v_construction = "fixed-point", v_out = "verify.csv";
  bool v_inject = false;
  auto* verify_cmd =
      app.add_subcommand("verify", "finite-MDP Theorem 1 / Lemma 1 verification");
  verify_cmd->add_option("--instances", v_instances, "number of random MDPs");
  verify_cmd->add_option("--seed", v_seed, "seed");
  verify_cmd->add_option("--tol", v_tol, "violation tolerance");
  verify_cmd->add_option("--construction", v_construction, "fixed-point | arbitrary");
  verify_cmd->add_option("--out", v_out, "margins CSV path");
  verify_cmd->add_flag("--inject-bad-rprime", v_inject,
                       "corrupt one instance so R' < R (precondition demo)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(config_path);
    if (*bias_cmd) return cmd_bias_ablation(ablation_config);
    if (*toy_cmd)
      return cmd_svgd_toy(toy_target, toy_beta, toy_steps, toy_particles, toy_samples,
                          toy_lr, toy_seed, toy_out);
    if (*verify_cmd)
      return cmd_verify(v_instances, v_seed, v_tol, v_construction, v_out, v_inject);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const mdp::PreconditionError& e) {
    std::cerr << "precondition error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NanError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 3;
  } catch (const svgd::ToyDivergence& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
