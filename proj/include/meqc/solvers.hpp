#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "meqc/cost.hpp"
#include "meqc/environment.hpp"
#include "meqc/rng.hpp"
#include "meqc/scenario.hpp"

namespace meqc {

enum class PolicyKind { kLocal, kRandom, kRandomCloud, kGreedy, kOracle };

std::string_view to_string(PolicyKind kind);
PolicyKind parse_policy_kind(std::string_view name);

// Local: everything on-device. Random: uniform server and ratio.
// RandomCloud: uniform server, everything offloaded. Greedy/Oracle delegate
// to solve_greedy/solve_exhaustive. Indicators come resolved.
JointAction solve_baseline(PolicyKind kind, const Scenario& scenario, Rng& rng);

/// Users in descending workload (s_u * n_u) order each pick their cheapest
/// (server, ratio in {0, 1}, QPU) option given the QPU slots granted so far.
JointAction solve_greedy(const Scenario& scenario);

struct ExhaustiveOptions {
  std::uint64_t budget = 100'000'000;  // max joint configurations examined
  bool allow_quantum = true;           // false: classical-only optimum
};

struct ExhaustiveResult {
  JointAction action;
  double cost = 0.0;
  std::uint64_t evaluated = 0;
};

/// Global minimum over all server assignments, all per-server QPU grants
/// satisfying the one-task-per-QPU rule, and local ratios in {0, 1}. Ties go
/// to the lexicographically first (assignment, grant, ratio) triple.
ExhaustiveResult solve_exhaustive(const Scenario& scenario, ExhaustiveOptions options = {});

// Upper bound on configurations solve_exhaustive would examine.
double exhaustive_size(std::size_t users, std::size_t servers);

// A policy maps the environment's current state to raw actions.
using Policy =
    std::function<std::vector<RawAction>(const Environment&, std::span<const Observation>, Rng&)>;

Policy make_policy(PolicyKind kind);
// Classical-only exhaustive optimum (no QPU grants).
Policy make_classical_oracle_policy();

std::vector<RawAction> to_raw(const JointAction& action);

struct EvalStats {
  std::size_t episodes = 0;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double mean_latency_cost = 0.0;
  double mean_energy_cost = 0.0;
  CostBreakdown mean_components;  // summed over users, averaged over episodes
  double qpu_grant_rate = 0.0;    // fraction of user-decisions run on a QPU
  double mean_success_prob = 0.0;
};

EvalStats evaluate(const Policy& policy, Environment& env, std::size_t episodes, Rng& rng);

}  // namespace meqc
