#include <doctest.h>

#include <limits>

#include "meqc/errors.hpp"
#include "meqc/solvers.hpp"
#include "meqc/workload.hpp"

using namespace meqc;

namespace {

Scenario quantum_friendly(std::size_t users, std::size_t servers, std::uint64_t seed) {
  Scenario sc = gen_scenario(users, servers, seed);
  sc.chip_coefficient = 1e-3;
  for (auto& s : sc.servers) {
    s.level = 2;
    s.physical_qubits = 5'000'000;
  }
  refresh_subscriptions(sc);
  return sc;
}

// Independent brute force: every server assignment, every legal set of QPU
// holders, every user at its cheaper endpoint. Evaluated through total_cost.
double brute_force(const Scenario& sc, bool allow_quantum) {
  const std::size_t U = sc.num_users(), E = sc.num_servers();
  double best = std::numeric_limits<double>::infinity();
  std::size_t assignments = 1;
  for (std::size_t u = 0; u < U; ++u) assignments *= E;
  const OffloadTable table(sc);
  for (std::size_t code = 0; code < assignments; ++code) {
    JointAction a = JointAction::all_local(U);
    std::size_t c = code;
    for (std::size_t u = 0; u < U; ++u, c /= E) a.server[u] = c % E;
    for (std::uint32_t grants = 0; grants < (1U << U); ++grants) {
      if (!allow_quantum && grants) break;
      bool ok = true;
      std::vector<int> per_server(E, 0);
      for (std::size_t u = 0; u < U; ++u) {
        a.quantum[u] = (grants >> u) & 1U;
        if (a.quantum[u] && (!table.eligible(u, a.server[u]) || ++per_server[a.server[u]] > 1)) ok = false;
      }
      if (!ok) continue;
      for (std::uint32_t mask = 0; mask < (1U << U); ++mask) {
        for (std::size_t u = 0; u < U; ++u) a.local_ratio[u] = (mask >> u) & 1U ? 1.0 : 0.0;
        best = std::min(best, total_cost(sc, a).total);
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("policy names") {
  for (auto k : {PolicyKind::kLocal, PolicyKind::kRandom, PolicyKind::kRandomCloud,
                 PolicyKind::kGreedy, PolicyKind::kOracle})
    CHECK(parse_policy_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_policy_kind("best"), ConfigError);
}

TEST_CASE("exhaustive search matches an independent brute force") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Scenario plain = gen_scenario(3, 2, seed);
    CHECK(solve_exhaustive(plain).cost == doctest::Approx(brute_force(plain, true)).epsilon(1e-12));
    const Scenario q = quantum_friendly(3, 2, seed);
    const auto r = solve_exhaustive(q);
    CHECK(r.cost == doctest::Approx(brute_force(q, true)).epsilon(1e-12));
    CHECK(r.cost == doctest::Approx(total_cost(q, r.action).total).epsilon(1e-12));
    ExhaustiveOptions classical;
    classical.allow_quantum = false;
    const auto rc = solve_exhaustive(q, classical);
    CHECK(rc.cost == doctest::Approx(brute_force(q, false)).epsilon(1e-12));
    CHECK(r.cost < rc.cost);
  }
}

TEST_CASE("oracle lower-bounds the baselines") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (const Scenario& sc : {gen_scenario(3, 3, seed), quantum_friendly(3, 3, seed)}) {
      const double oracle = solve_exhaustive(sc).cost;
      Rng rng(seed);
      CHECK(oracle <= total_cost(sc, solve_greedy(sc)).total * (1 + 1e-12));
      for (auto k : {PolicyKind::kLocal, PolicyKind::kRandom, PolicyKind::kRandomCloud})
        CHECK(oracle <= total_cost(sc, solve_baseline(k, sc, rng)).total * (1 + 1e-12));
    }
  }
}

TEST_CASE("greedy respects the one-task-per-QPU rule") {
  const Scenario sc = quantum_friendly(5, 2, 3);
  const JointAction a = solve_greedy(sc);
  std::vector<int> holders(2, 0);
  for (std::size_t u = 0; u < 5; ++u) holders[a.server[u]] += a.quantum[u];
  CHECK(holders[0] <= 1);
  CHECK(holders[1] <= 1);
  CHECK(holders[0] + holders[1] >= 1);
  CHECK_NOTHROW(total_cost(sc, a));
}

TEST_CASE("exhaustive budget") {
  const Scenario sc = gen_scenario(6, 4, 1);
  ExhaustiveOptions small;
  small.budget = 1000;
  CHECK_THROWS_AS(solve_exhaustive(sc, small), InstanceTooLargeError);
  CHECK(exhaustive_size(2, 3) == 9.0 * 16.0);
}

TEST_CASE("ties resolve to the lexicographically first configuration") {
  Scenario sc = gen_scenario(2, 2, 5);
  // Identical servers and gains make both assignments tie.
  sc.servers[1] = sc.servers[0];
  for (auto& u : sc.users) u.profile.channel_gains.setConstant(5.0);
  const auto r = solve_exhaustive(sc);
  for (std::size_t u = 0; u < 2; ++u)
    if (r.action.local_ratio[u] < 1.0) CHECK(r.action.server[u] == 0);
}

TEST_CASE("evaluation statistics") {
  Environment env(gen_scenario(3, 2, 7));
  Rng rng(1);
  const EvalStats local = evaluate(make_policy(PolicyKind::kLocal), env, 5, rng);
  CHECK(local.std_cost == 0.0);
  CHECK(local.qpu_grant_rate == 0.0);
  CHECK(local.mean_cost == doctest::Approx(local.mean_latency_cost + local.mean_energy_cost));
  CHECK(local.mean_cost == doctest::Approx(total_cost(env.scenario(), JointAction::all_local(3)).total));

  Rng a(9), b(9);
  const EvalStats ra = evaluate(make_policy(PolicyKind::kRandom), env, 20, a);
  const EvalStats rb = evaluate(make_policy(PolicyKind::kRandom), env, 20, b);
  CHECK(ra.mean_cost == rb.mean_cost);
  CHECK(ra.std_cost > 0.0);
  CHECK_THROWS_AS(evaluate(make_policy(PolicyKind::kLocal), env, 0, rng), ContractError);
}
