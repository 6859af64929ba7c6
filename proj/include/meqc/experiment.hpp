#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meqc/environment.hpp"
#include "meqc/ppo.hpp"
#include "meqc/scenario.hpp"
#include "meqc/workload.hpp"

namespace meqc {

enum class SweepParam { kNone, kEdgeCpu, kPhysicalQubits, kDecoherenceTime, kWeights };

std::string to_string(SweepParam p);

struct SweepSpec {
  SweepParam param = SweepParam::kNone;
  std::vector<double> values = {0.0};
};

// Policy names accepted in `policies`: the five solver kinds plus
// "classical_oracle" (exhaustive, no QPU) and "ppo" (trained per run).
struct ExperimentConfig {
  std::size_t users = 10;
  std::size_t servers = 10;
  std::vector<std::uint64_t> seeds = {1};
  ScenarioRanges ranges;
  CryostatConfig cryostat;
  QubitTech qubit;
  double chip_coefficient = 1e-11;
  double error_threshold = 2e-4;
  double success_threshold = 2.0 / 3.0;
  SweepSpec sweep;
  std::vector<std::string> policies = {"local", "random", "random_cloud", "greedy"};
  std::size_t episodes = 100;
  std::string output = "results.csv";
  EnvConfig environment;
  std::uint64_t exhaustive_budget = 100'000'000;
  TrainConfig train;
};

/// Parses a YAML document. Missing keys keep their defaults; unknown keys
/// and out-of-range values raise ConfigError naming the key and line.
ExperimentConfig parse_config(const std::string& document);
ExperimentConfig load_config(const std::string& path);

// Scenario for one seed with the config's ranges and device settings.
Scenario build_scenario(const ExperimentConfig& cfg, std::uint64_t seed);

void apply_sweep_value(Scenario& scenario, SweepParam param, double value);

struct ResultRow {
  std::uint64_t seed = 0;
  std::string policy;
  std::string param;
  double value = 0.0;
  double mean_cost = 0.0;
  double latency_cost = 0.0;
  double energy_cost = 0.0;
  double qpu_grant_rate = 0.0;
  double mean_success_prob = 0.0;
};

// Evaluates one named policy on a scenario.
EvalStats evaluate_named(const std::string& policy, const Scenario& scenario,
                         const ExperimentConfig& cfg, std::uint64_t seed);

/// One row per (sweep value, policy, seed), sorted by (value, policy, seed).
/// Sweep points are evaluated on worker threads.
std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg);

std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

std::string learning_curve_csv(const std::vector<EpochStats>& curve);

}  // namespace meqc
