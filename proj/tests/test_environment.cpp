#include <doctest.h>

#include <sstream>

#include "meqc/environment.hpp"
#include "meqc/errors.hpp"
#include "meqc/workload.hpp"

using namespace meqc;

namespace {

// Classical processing made expensive enough that every QPU grant saves cost.
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

}  // namespace

TEST_CASE("observation layout and range") {
  const Scenario sc = gen_scenario(4, 3, 2);
  const Observation o = observe(sc, 1);
  REQUIRE(o.size() == observation_size(3));
  CHECK(o.size() == 14);
  CHECK(o.minCoeff() >= 0.0);
  CHECK(o.maxCoeff() <= 1.0);
  const auto& u = sc.users[1];
  CHECK(o(1) == doctest::Approx(u.task.data_size / 1600e6));
  CHECK(o(8 + 3 + 2) == doctest::Approx(u.profile.channel_gains(2) / 8.0));
  CHECK(o(7 + 1) == doctest::Approx(sc.servers[1].level / 3.0));
}

TEST_CASE("step contract") {
  Environment env(gen_scenario(2, 2, 3));
  std::vector<RawAction> a(2);
  CHECK_THROWS_AS(env.step(a), ContractError);
  env.reset();
  std::vector<RawAction> short_action(1);
  CHECK_THROWS_AS(env.step(short_action), ContractError);
  a[1].server = 5;
  CHECK_THROWS_AS(env.step(a), ContractError);
}

TEST_CASE("ratios are clamped and NaN means fully local") {
  Environment env(gen_scenario(3, 2, 3));
  env.reset();
  const std::vector<RawAction> a = {{0, -0.5}, {1, 2.0}, {1, std::nan("")}};
  const StepResult r = env.step(a);
  CHECK(r.action.local_ratio == std::vector<double>{0.0, 1.0, 1.0});
  CHECK(r.reward == -r.info.total);
  const JointAction all_local = JointAction::all_local(3);
  JointAction same = r.action;
  CHECK(-total_cost(env.scenario(), same).total == r.reward);
  (void)all_local;
}

TEST_CASE("no grants when the QPU does not pay off") {
  Environment env(gen_scenario(4, 2, 8));
  env.reset();
  const std::vector<RawAction> a(4, RawAction{0, 0.0});
  const StepResult r = env.step(a);
  for (auto g : r.action.quantum) CHECK(g == 0);
}

TEST_CASE("one grant per server, arbitration rules") {
  const Scenario sc = quantum_friendly(4, 2, 13);
  const OffloadTable table(sc);
  for (std::size_t u = 0; u < 4; ++u) REQUIRE(table.eligible(u, 0));

  const std::vector<std::size_t> servers = {0, 0, 0, 1};
  const std::vector<double> ratios = {0.0, 0.0, 0.0, 0.0};
  std::size_t expect = 0;
  double best = -1.0;
  for (std::size_t u = 0; u < 3; ++u) {
    const double saving = table.edge(u, 0) - table.quantum(u, 0);
    REQUIRE(saving > 0.0);
    if (saving > best) {
      best = saving;
      expect = u;
    }
  }
  const auto largest = resolve_quantum_allocation(table, servers, ratios, Arbitration::kLargestSaving);
  for (std::size_t u = 0; u < 3; ++u) CHECK(largest[u] == (u == expect ? 1 : 0));
  CHECK(largest[3] == 1);

  const auto first = resolve_quantum_allocation(table, servers, ratios, Arbitration::kFirstIndex);
  CHECK(first == std::vector<std::uint8_t>{1, 0, 0, 1});

  // A fully local user offloads nothing and is never granted.
  const std::vector<double> local_first = {1.0, 0.0, 0.0, 1.0};
  const auto g = resolve_quantum_allocation(table, servers, local_first, Arbitration::kFirstIndex);
  CHECK(g == std::vector<std::uint8_t>{0, 1, 0, 0});
}

TEST_CASE("task redraw on reset is deterministic") {
  EnvConfig cfg;
  cfg.redraw_tasks = true;
  Environment a(gen_scenario(3, 2, 4), cfg);
  Environment b(gen_scenario(3, 2, 4), cfg);
  const auto oa = a.reset();
  const auto ob = b.reset();
  for (std::size_t u = 0; u < 3; ++u) CHECK(oa[u] == ob[u]);
  const double s0 = a.scenario().users[0].task.data_size;
  a.reset();
  CHECK(a.scenario().users[0].task.data_size != s0);

  Environment fixed(gen_scenario(3, 2, 4));
  const auto f0 = fixed.reset();
  const auto f1 = fixed.reset();
  CHECK(f0[0] == f1[0]);
}

TEST_CASE("trajectory dump") {
  Environment env(gen_scenario(2, 2, 4));
  const auto obs = env.reset();
  const StepResult r = env.step(std::vector<RawAction>{{0, 1.0}, {1, 0.25}});
  std::ostringstream out;
  TrajectoryWriter w(out, env.observation_dim());
  w.write(7, obs, r);
  std::istringstream in(out.str());
  std::string header, line1, line2, extra;
  std::getline(in, header);
  std::getline(in, line1);
  std::getline(in, line2);
  CHECK(header.rfind("step,user,server,local_ratio,indicator,reward,obs_0,", 0) == 0);
  CHECK(line2.rfind("7,1,1,0.25,0,", 0) == 0);
  CHECK_FALSE(std::getline(in, extra));
}
