#include "meqc/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace meqc {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kLocal: return "local";
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kRandomCloud: return "random_cloud";
    case PolicyKind::kGreedy: return "greedy";
    case PolicyKind::kOracle: return "oracle";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto k : {PolicyKind::kLocal, PolicyKind::kRandom, PolicyKind::kRandomCloud,
                 PolicyKind::kGreedy, PolicyKind::kOracle})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

JointAction solve_baseline(PolicyKind kind, const Scenario& scenario, Rng& rng) {
  const std::size_t users = scenario.num_users();
  const std::size_t servers = scenario.num_servers();
  JointAction a;
  switch (kind) {
    case PolicyKind::kLocal:
      return JointAction::all_local(users);
    case PolicyKind::kRandom:
    case PolicyKind::kRandomCloud:
      a.server.resize(users);
      a.local_ratio.resize(users);
      for (std::size_t u = 0; u < users; ++u) {
        a.server[u] = rng.index(servers);
        a.local_ratio[u] = kind == PolicyKind::kRandom ? rng.uniform() : 0.0;
      }
      a.quantum = resolve_quantum_allocation(OffloadTable(scenario), a.server, a.local_ratio);
      return a;
    case PolicyKind::kGreedy:
      return solve_greedy(scenario);
    case PolicyKind::kOracle:
      return solve_exhaustive(scenario).action;
  }
  return a;
}

JointAction solve_greedy(const Scenario& scenario) {
  const OffloadTable table(scenario);
  const std::size_t users = scenario.num_users();
  const std::size_t servers = scenario.num_servers();

  std::vector<std::size_t> order(users);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return scenario.users[x].task.cycles() > scenario.users[y].task.cycles();
  });

  JointAction a = JointAction::all_local(users);
  std::vector<bool> slot_taken(servers, false);
  for (std::size_t u : order) {
    double best = table.local(u);
    for (std::size_t e = 0; e < servers; ++e) {
      if (table.edge(u, e) < best) {
        best = table.edge(u, e);
        a.server[u] = e;
        a.local_ratio[u] = 0.0;
        a.quantum[u] = 0;
      }
      const bool qpu_ok = table.eligible(u, e) && !slot_taken[e] &&
                          table.quantum(u, e) < table.edge(u, e);
      if (qpu_ok && table.quantum(u, e) < best) {
        best = table.quantum(u, e);
        a.server[u] = e;
        a.local_ratio[u] = 0.0;
        a.quantum[u] = 1;
      }
    }
    if (a.quantum[u]) slot_taken[a.server[u]] = true;
  }
  return a;
}

double exhaustive_size(std::size_t users, std::size_t servers) {
  // assignments x grant subsets (bounded by 2^U) x ratio endpoints
  return std::pow(static_cast<double>(servers), static_cast<double>(users)) *
         std::pow(4.0, static_cast<double>(users));
}

ExhaustiveResult solve_exhaustive(const Scenario& scenario, ExhaustiveOptions options) {
  const std::size_t users = scenario.num_users();
  const std::size_t servers = scenario.num_servers();
  if (users >= 64 || exhaustive_size(users, servers) > static_cast<double>(options.budget))
    throw InstanceTooLargeError("solve_exhaustive: " + std::to_string(users) + " users x " +
                                std::to_string(servers) + " servers exceeds budget of " +
                                std::to_string(options.budget) + " configurations");
  const OffloadTable table(scenario);

  ExhaustiveResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> assign(users, 0);
  std::vector<std::vector<std::size_t>> candidates(servers);
  std::vector<std::size_t> grant_choice(servers, 0);
  std::vector<std::uint8_t> on_qpu(users, 0);
  const std::uint64_t ratio_masks = std::uint64_t{1} << users;

  while (true) {
    for (auto& c : candidates) c.clear();
    if (options.allow_quantum)
      for (std::size_t u = 0; u < users; ++u)
        if (table.eligible(u, assign[u])) candidates[assign[u]].push_back(u);

    std::fill(grant_choice.begin(), grant_choice.end(), 0);
    while (true) {
      std::fill(on_qpu.begin(), on_qpu.end(), 0);
      for (std::size_t e = 0; e < servers; ++e)
        if (grant_choice[e] > 0) on_qpu[candidates[e][grant_choice[e] - 1]] = 1;

      // Bit u set means user u keeps its task local (phi = 1).
      for (std::uint64_t mask = 0; mask < ratio_masks; ++mask) {
        double c = 0.0;
        for (std::size_t u = 0; u < users; ++u) {
          const double phi = (mask >> u) & 1U ? 1.0 : 0.0;
          c += table.user_cost(u, assign[u], on_qpu[u] != 0, phi);
        }
        ++best.evaluated;
        if (c < best.cost) {
          best.cost = c;
          best.action.server = assign;
          best.action.quantum = on_qpu;
          best.action.local_ratio.resize(users);
          for (std::size_t u = 0; u < users; ++u)
            best.action.local_ratio[u] = (mask >> u) & 1U ? 1.0 : 0.0;
        }
      }

      std::size_t e = servers;
      while (e-- > 0) {
        if (++grant_choice[e] <= candidates[e].size()) break;
        grant_choice[e] = 0;
      }
      if (e == static_cast<std::size_t>(-1)) break;
    }

    std::size_t u = users;
    while (u-- > 0) {
      if (++assign[u] < servers) break;
      assign[u] = 0;
    }
    if (u == static_cast<std::size_t>(-1)) break;
  }
  return best;
}

std::vector<RawAction> to_raw(const JointAction& action) {
  std::vector<RawAction> raw(action.size());
  for (std::size_t u = 0; u < action.size(); ++u) raw[u] = {action.server[u], action.local_ratio[u]};
  return raw;
}

Policy make_policy(PolicyKind kind) {
  return [kind](const Environment& env, std::span<const Observation>, Rng& rng) {
    return to_raw(solve_baseline(kind, env.scenario(), rng));
  };
}

Policy make_classical_oracle_policy() {
  return [](const Environment& env, std::span<const Observation>, Rng&) {
    ExhaustiveOptions opts;
    opts.allow_quantum = false;
    return to_raw(solve_exhaustive(env.scenario(), opts).action);
  };
}

EvalStats evaluate(const Policy& policy, Environment& env, std::size_t episodes, Rng& rng) {
  if (episodes < 1) throw ContractError("evaluate: episodes must be >= 1");
  EvalStats s;
  s.episodes = episodes;
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t decisions = 0;
  double granted = 0.0;
  double success = 0.0;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    const auto obs = env.reset();
    const auto actions = policy(env, obs, rng);
    const StepResult r = env.step(actions);
    const double c = r.info.total;
    const double delta = c - mean;
    mean += delta / static_cast<double>(ep + 1);
    m2 += delta * (c - mean);
    for (std::size_t u = 0; u < r.info.per_user.size(); ++u) {
      s.mean_components += r.info.per_user[u];
      granted += r.action.quantum[u];
      success += r.info.success_prob[u];
      ++decisions;
    }
  }
  const double n = static_cast<double>(episodes);
  s.mean_cost = mean;
  s.std_cost = episodes > 1 ? std::sqrt(m2 / (n - 1.0)) : 0.0;
  CostBreakdown& m = s.mean_components;
  for (double* f : {&m.d_local, &m.d_transmit, &m.d_edge, &m.d_quantum, &m.e_local, &m.e_transmit,
                    &m.e_edge, &m.e_quantum, &m.cost, &m.latency_cost, &m.energy_cost})
    *f /= n;
  s.mean_latency_cost = m.latency_cost;
  s.mean_energy_cost = m.energy_cost;
  s.qpu_grant_rate = granted / static_cast<double>(decisions);
  s.mean_success_prob = success / static_cast<double>(decisions);
  return s;
}

}  // namespace meqc
