// meqc: scenario generation, policy evaluation, training and sweeps.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "meqc/csv.hpp"
#include "meqc/errors.hpp"
#include "meqc/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "YAML experiment config (defaults when omitted)");
  cmd->add_option("--seed", c.seed, "Override the scenario seed list with one seed");
}

meqc::ExperimentConfig resolve(const Common& c) {
  meqc::ExperimentConfig cfg = c.config.empty() ? meqc::parse_config("") : meqc::load_config(c.config);
  if (c.seed) cfg.seeds = {*c.seed};
  return cfg;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    meqc::csv::write_file(path, text);
  }
}

int cmd_gen(const Common& c, const std::string& out) {
  const auto cfg = resolve(c);
  const auto sc = meqc::build_scenario(cfg, cfg.seeds.front());
  if (out.empty() || out == "-") {
    std::cout << meqc::scenario_to_json(sc) << '\n';
  } else {
    meqc::save_scenario(sc, out);
  }
  return 0;
}

int cmd_eval(const Common& c, const std::string& scenario_path, std::vector<std::string> policies,
             std::string out, const std::string& trajectory) {
  auto cfg = resolve(c);
  if (!policies.empty()) cfg.policies = policies;
  if (out.empty()) out = cfg.output;

  std::vector<meqc::ResultRow> rows;
  for (std::uint64_t seed : cfg.seeds) {
    meqc::Scenario sc = scenario_path.empty() ? meqc::build_scenario(cfg, seed)
                                              : meqc::load_scenario(scenario_path);
    for (const auto& name : cfg.policies) {
      const auto s = meqc::evaluate_named(name, sc, cfg, seed);
      rows.push_back({seed, name, "none", 0.0, s.mean_cost, s.mean_latency_cost, s.mean_energy_cost,
                      s.qpu_grant_rate, s.mean_success_prob});
    }
    if (!trajectory.empty() && seed == cfg.seeds.front()) {
      // One episode of the first policy, step by step.
      meqc::Environment env(sc, cfg.environment);
      std::ofstream f(trajectory, std::ios::binary);
      if (!f) throw meqc::Error("cannot open trajectory file " + trajectory);
      meqc::TrajectoryWriter writer(f, env.observation_dim());
      const auto& first = cfg.policies.front();
      if (first == "ppo" || first == "oracle" || first == "classical_oracle")
        throw meqc::ConfigError("--trajectory supports only local, random, random_cloud, greedy");
      auto policy = meqc::make_policy(meqc::parse_policy_kind(first));
      meqc::Rng rng(seed);
      auto obs = env.reset();
      const auto res = env.step(policy(env, obs, rng));
      writer.write(0, obs, res);
    }
  }
  write_or_print(out, meqc::rows_to_csv(rows));
  return 0;
}

int cmd_train(const Common& c, const std::string& checkpoint, const std::string& curve, bool quiet) {
  const auto cfg = resolve(c);
  const std::uint64_t seed = cfg.seeds.front();
  const auto sc = meqc::build_scenario(cfg, seed);
  meqc::TrainConfig tc = cfg.train;
  tc.arbitration = cfg.environment.arbitration;
  tc.redraw_tasks = cfg.environment.redraw_tasks;
  const auto result = meqc::train(sc, tc, seed, [quiet](const meqc::EpochStats& e) {
    if (!quiet) std::fprintf(stderr, "epoch %d mean_cost %.6g\n", e.epoch, e.mean_cost);
  });
  if (result.halted) std::fprintf(stderr, "training halted: %s\n", result.diagnostics.c_str());
  if (!checkpoint.empty()) meqc::save_checkpoint(checkpoint, result.agents);
  write_or_print(curve, meqc::learning_curve_csv(result.curve));
  return result.halted ? kExitRuntime : 0;
}

int cmd_sweep(const Common& c, std::string out) {
  const auto cfg = resolve(c);
  if (out.empty()) out = cfg.output;
  write_or_print(out, meqc::rows_to_csv(meqc::run_sweep(cfg)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobile edge-quantum offloading laboratory"};
  app.require_subcommand(1);

  Common common;
  std::string out, scenario_path, trajectory, checkpoint;
  std::vector<std::string> policies;
  bool quiet = false;

  auto* gen = app.add_subcommand("gen", "Generate a scenario as JSON");
  add_common(gen, common);
  gen->add_option("--out", out, "Output path ('-' for stdout)");

  auto* eval = app.add_subcommand("eval", "Evaluate policies and write result rows as CSV");
  add_common(eval, common);
  eval->add_option("--scenario", scenario_path, "Scenario JSON instead of a generated one");
  eval->add_option("--policy", policies, "Policies to evaluate (repeatable)");
  eval->add_option("--out", out, "Results CSV ('-' for stdout; default from config)");
  eval->add_option("--trajectory", trajectory, "Per-step CSV dump of one episode");

  auto* tr = app.add_subcommand("train", "Train the multi-agent PPO learner");
  add_common(tr, common);
  tr->add_option("--checkpoint", checkpoint, "Where to save the trained agents");
  tr->add_option("--out", out, "Learning-curve CSV ('-' for stdout)");
  tr->add_flag("--quiet", quiet, "Suppress per-epoch progress");

  auto* sweep = app.add_subcommand("sweep", "Run the configured parameter sweep");
  add_common(sweep, common);
  sweep->add_option("--out", out, "Results CSV ('-' for stdout; default from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) return cmd_gen(common, out);
    if (*eval) return cmd_eval(common, scenario_path, policies, out, trajectory);
    if (*tr) return cmd_train(common, checkpoint, out, quiet);
    if (*sweep) return cmd_sweep(common, out);
  } catch (const meqc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
