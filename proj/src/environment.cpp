#include "meqc/environment.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "meqc/workload.hpp"

namespace meqc {

Observation observe(const Scenario& sc, std::size_t user) {
  const UserEntry& entry = sc.users.at(user);
  const UserProfile& p = entry.profile;
  const ObservationScales& s = sc.scales;
  const auto servers = static_cast<Eigen::Index>(sc.num_servers());

  Observation o(observation_size(sc.num_servers()));
  o(0) = p.f_local / s.f_local;
  o(1) = entry.task.data_size / s.data_size;
  o(2) = entry.task.cycles_per_byte / s.cycles_per_byte;
  o(3) = entry.quantum.logical_qubits / s.logical_qubits;
  o(4) = entry.quantum.logical_depth / s.logical_depth;
  o(5) = p.edge_cpu / s.edge_cpu;
  o(6) = p.subscribed_logical_qubits / s.logical_capacity;
  for (Eigen::Index e = 0; e < servers; ++e)
    o(7 + e) = sc.servers[static_cast<std::size_t>(e)].level / s.level;
  o(7 + servers) = p.tx_power / s.tx_power;
  o.segment(8 + servers, servers) = p.channel_gains / s.channel_gain;
  return o;
}

std::vector<std::uint8_t> resolve_quantum_allocation(const OffloadTable& table,
                                                     std::span<const std::size_t> servers,
                                                     std::span<const double> local_ratios,
                                                     Arbitration rule) {
  const std::size_t users = servers.size();
  std::vector<std::uint8_t> grant(users, 0);
  std::vector<std::ptrdiff_t> holder(table.num_servers(), -1);
  std::vector<double> best(table.num_servers(), 0.0);
  for (std::size_t u = 0; u < users; ++u) {
    const std::size_t e = servers[u];
    if (!table.eligible(u, e)) continue;
    const double saving = (1.0 - local_ratios[u]) * (table.edge(u, e) - table.quantum(u, e));
    if (!(saving > 0.0)) continue;
    const bool take = holder[e] < 0 || (rule == Arbitration::kLargestSaving && saving > best[e]);
    if (take) {
      holder[e] = static_cast<std::ptrdiff_t>(u);
      best[e] = saving;
    }
  }
  for (std::ptrdiff_t h : holder)
    if (h >= 0) grant[static_cast<std::size_t>(h)] = 1;
  return grant;
}

Environment::Environment(Scenario scenario, EnvConfig config)
    : scenario_(std::move(scenario)), config_(config), table_(scenario_) {
  scenario_.validate();
}

std::vector<Observation> Environment::observations() const {
  std::vector<Observation> out;
  out.reserve(scenario_.num_users());
  for (std::size_t u = 0; u < scenario_.num_users(); ++u) out.push_back(observe(scenario_, u));
  return out;
}

std::vector<Observation> Environment::reset() {
  if (config_.redraw_tasks) {
    const KeyedRng rng = KeyedRng(scenario_.seed).fork(++episode_);
    for (std::size_t u = 0; u < scenario_.num_users(); ++u) redraw_task(scenario_.users[u], rng, u);
    table_ = OffloadTable(scenario_);
  }
  ready_ = true;
  return observations();
}

StepResult Environment::step(std::span<const RawAction> actions) {
  if (!ready_) throw ContractError("Environment::step called before reset");
  const std::size_t users = scenario_.num_users();
  if (actions.size() != users)
    throw ContractError("Environment::step: expected " + std::to_string(users) + " actions, got " +
                        std::to_string(actions.size()));

  StepResult r;
  r.action.server.resize(users);
  r.action.local_ratio.resize(users);
  for (std::size_t u = 0; u < users; ++u) {
    if (actions[u].server >= scenario_.num_servers())
      throw ContractError("Environment::step: server index out of range for user " +
                          std::to_string(u));
    r.action.server[u] = actions[u].server;
    const double phi = actions[u].local_ratio;
    r.action.local_ratio[u] = std::isnan(phi) ? 1.0 : std::clamp(phi, 0.0, 1.0);
  }
  r.action.quantum = resolve_quantum_allocation(table_, r.action.server, r.action.local_ratio,
                                                config_.arbitration);
  r.info = total_cost(scenario_, r.action);
  r.reward = -r.info.total;
  if (config_.redraw_tasks) {
    r.observations = reset();
  } else {
    r.observations = observations();
  }
  return r;
}

TrajectoryWriter::TrajectoryWriter(std::ostream& out, Eigen::Index observation_dim) : out_(out) {
  out_ << "step,user,server,local_ratio,indicator,reward";
  for (Eigen::Index i = 0; i < observation_dim; ++i) out_ << ",obs_" << i;
  out_ << '\n';
}

void TrajectoryWriter::write(std::uint64_t step, std::span<const Observation> observations,
                             const StepResult& result) {
  char buf[32];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
  };
  for (std::size_t u = 0; u < observations.size(); ++u) {
    out_ << step << ',' << u << ',' << result.action.server[u] << ','
         << num(result.action.local_ratio[u]) << ',' << int(result.action.quantum[u]) << ','
         << num(result.reward);
    for (Eigen::Index i = 0; i < observations[u].size(); ++i) out_ << ',' << num(observations[u](i));
    out_ << '\n';
  }
}

}  // namespace meqc
