#include "meqc/cost.hpp"

#include <cmath>
#include <string>

namespace meqc {

void UserProfile::validate(Eigen::Index num_servers) const {
  if (!(f_local > 0.0)) throw ConfigError("user: f_local must be > 0");
  if (!(tx_power > 0.0)) throw ConfigError("user: tx_power must be > 0");
  if (weight_latency < 0.0 || weight_latency > 1.0 || weight_energy < 0.0 || weight_energy > 1.0)
    throw ConfigError("user: weights must lie in [0, 1]");
  if (channel_gains.size() != num_servers)
    throw ConfigError("user: need one channel gain per server");
  if ((channel_gains.array() <= 0.0).any()) throw ConfigError("user: channel gains must be > 0");
  if (!(edge_cpu > 0.0)) throw ConfigError("user: edge_cpu must be > 0");
  if (subscribed_logical_qubits < 0) throw ConfigError("user: subscribed qubits must be >= 0");
}

void TaskSpec::validate() const {
  if (!(data_size > 0.0) || !(cycles_per_byte > 0.0))
    throw ConfigError("task: data_size and cycles_per_byte must be > 0");
}

void QuantumTaskSpec::validate() const {
  if (!(data_size > 0.0) || logical_qubits <= 0 || logical_depth <= 0)
    throw ConfigError("quantum task: size, qubits and depth must be > 0");
}

int ServerProfile::logical_capacity() const {
  return static_cast<int>(physical_qubits / static_cast<long long>(std::llround(std::pow(91.0, level))));
}

void ServerProfile::validate() const {
  if (!(noise_power > 0.0)) throw ConfigError("server: noise_power must be > 0");
  if (!(bandwidth > 0.0)) throw ConfigError("server: bandwidth must be > 0");
  if (level < 1 || level > 3) throw ConfigError("server: level must be in {1, 2, 3}");
  if (physical_qubits < 0) throw ConfigError("server: physical_qubits must be >= 0");
}

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& o) {
  d_local += o.d_local;
  d_transmit += o.d_transmit;
  d_edge += o.d_edge;
  d_quantum += o.d_quantum;
  e_local += o.e_local;
  e_transmit += o.e_transmit;
  e_edge += o.e_edge;
  e_quantum += o.e_quantum;
  cost += o.cost;
  latency_cost += o.latency_cost;
  energy_cost += o.energy_cost;
  return *this;
}

JointAction JointAction::all_local(std::size_t users) {
  JointAction a;
  a.server.assign(users, 0);
  a.local_ratio.assign(users, 1.0);
  a.quantum.assign(users, 0);
  return a;
}

double uplink_rate(const UserProfile& user, std::span<const ServerProfile> servers,
                   std::size_t target) {
  if (target >= servers.size() || static_cast<Eigen::Index>(target) >= user.channel_gains.size())
    throw LookupError("uplink_rate: unknown server " + std::to_string(target));
  const ServerProfile& s = servers[target];
  const double snr = user.tx_power * user.channel_gains(static_cast<Eigen::Index>(target)) / s.noise_power;
  return s.bandwidth * std::log2(1.0 + snr);
}

namespace {

void weigh(CostBreakdown& c, const UserProfile& user) {
  c.latency_cost = user.weight_latency * c.latency();
  c.energy_cost = user.weight_energy * c.energy();
  c.cost = c.latency_cost + c.energy_cost;
}

}  // namespace

CostBreakdown local_cost(const UserProfile& user, const TaskSpec& task, double local_ratio,
                         double chip_coefficient) {
  CostBreakdown c;
  const double cycles = local_ratio * task.cycles();
  c.d_local = cycles / user.f_local;
  c.e_local = chip_coefficient * cycles;
  weigh(c, user);
  return c;
}

Transmission transmission_cost(const UserProfile& user, std::span<const ServerProfile> servers,
                               std::size_t target, const TaskSpec& task, double local_ratio) {
  const double rate = uplink_rate(user, servers, target);
  const double share = 1.0 - local_ratio;
  if (share <= 0.0) return {};
  if (!(rate > 0.0))
    throw InfeasibleLinkError("transmission_cost: zero uplink rate to server " +
                              std::to_string(target));
  Transmission t;
  t.latency = share * task.data_size * 8.0 / rate;
  t.energy = user.tx_power * t.latency;
  return t;
}

CostBreakdown edge_classical_cost(const UserProfile& user, const TaskSpec& task,
                                  double local_ratio, double chip_coefficient,
                                  const Transmission& link) {
  CostBreakdown c;
  const double cycles = (1.0 - local_ratio) * task.cycles();
  c.d_transmit = link.latency;
  c.e_transmit = link.energy;
  c.d_edge = cycles / user.edge_cpu;
  c.e_edge = chip_coefficient * cycles;
  weigh(c, user);
  return c;
}

CostBreakdown edge_quantum_cost(const UserProfile& user, const QuantumTaskSpec& qtask,
                                double local_ratio, const LogicalResources& resources,
                                const GatePowerProfile& powers, const QubitTech& tech,
                                const Transmission& link) {
  CostBreakdown c;
  const double prefactor = (1.0 - local_ratio) * qtask.data_size * qtask.logical_qubits;
  const double step_time = tech.tau_1qb * resources.n_1qb + tech.tau_2qb * resources.n_2qb +
                           tech.tau_meas * resources.n_meas;
  const double step_energy = powers.e_1qb() * resources.n_1qb + powers.e_2qb() * resources.n_2qb +
                             powers.e_meas() * resources.n_meas +
                             powers.e_qubit() * resources.physical_per_logical;
  c.d_transmit = link.latency;
  c.e_transmit = link.energy;
  c.d_quantum = prefactor * step_time;
  c.e_quantum = prefactor * step_energy;
  weigh(c, user);
  return c;
}

bool quantum_feasible(const QuantumTaskSpec& qtask, const UserProfile& user,
                      const ServerProfile& server, double success_prob,
                      double success_threshold) {
  const int capacity = std::min(user.subscribed_logical_qubits, server.logical_capacity());
  return qtask.logical_qubits <= capacity && success_prob >= success_threshold;
}

CostBreakdown user_breakdown(const Scenario& scenario, const DeviceModel& device,
                             std::size_t u, std::size_t server, double local_ratio,
                             bool on_qpu) {
  const UserEntry& entry = scenario.users.at(u);
  CostBreakdown c = local_cost(entry.profile, entry.task, local_ratio, scenario.chip_coefficient);
  if (local_ratio >= 1.0) return c;
  const Transmission link =
      transmission_cost(entry.profile, scenario.servers, server, entry.task, local_ratio);
  if (on_qpu) {
    const LogicalResources res = logical_resources(scenario.servers[server].level);
    c += edge_quantum_cost(entry.profile, entry.quantum, local_ratio, res, device.powers,
                           scenario.qubit, link);
  } else {
    c += edge_classical_cost(entry.profile, entry.task, local_ratio, scenario.chip_coefficient,
                             link);
  }
  return c;
}

OffloadTable::OffloadTable(const Scenario& scenario)
    : num_servers_(scenario.num_servers()),
      local_(scenario.num_users()),
      edge_(scenario.num_users(), scenario.num_servers()),
      quantum_(scenario.num_users(), scenario.num_servers()),
      success_(scenario.num_users(), scenario.num_servers()),
      eligible_(scenario.num_users(), scenario.num_servers()) {
  const DeviceModel device = make_device_model(scenario.cryostat, scenario.qubit);
  std::vector<LogicalResources> resources;
  for (const auto& s : scenario.servers) resources.push_back(logical_resources(s.level));

  for (std::size_t u = 0; u < scenario.num_users(); ++u) {
    const UserEntry& entry = scenario.users[u];
    local_[u] = local_cost(entry.profile, entry.task, 1.0, scenario.chip_coefficient).cost;
    for (std::size_t e = 0; e < num_servers_; ++e) {
      const auto i = static_cast<Eigen::Index>(u);
      const auto j = static_cast<Eigen::Index>(e);
      const Transmission link =
          transmission_cost(entry.profile, scenario.servers, e, entry.task, 0.0);
      edge_(i, j) =
          edge_classical_cost(entry.profile, entry.task, 0.0, scenario.chip_coefficient, link).cost;
      quantum_(i, j) = edge_quantum_cost(entry.profile, entry.quantum, 0.0, resources[e],
                                         device.powers, scenario.qubit, link)
                           .cost;
      success_(i, j) = success_probability(entry.quantum.logical_qubits,
                                           entry.quantum.logical_depth, scenario.servers[e].level,
                                           device.error_rate, scenario.error_threshold);
      eligible_(i, j) = quantum_feasible(entry.quantum, entry.profile, scenario.servers[e],
                                         success_(i, j), scenario.success_threshold);
    }
  }
}

double OffloadTable::user_cost(std::size_t u, std::size_t e, bool on_qpu, double phi) const {
  const auto i = static_cast<Eigen::Index>(u);
  const auto j = static_cast<Eigen::Index>(e);
  const double offload = on_qpu ? quantum_(i, j) : edge_(i, j);
  return phi * local_[u] + (1.0 - phi) * offload;
}

TotalCost total_cost(const Scenario& scenario, const JointAction& action) {
  const std::size_t users = scenario.num_users();
  if (action.server.size() != users || action.local_ratio.size() != users ||
      action.quantum.size() != users)
    throw ContractError("total_cost: action size does not match number of users");

  const DeviceModel device = make_device_model(scenario.cryostat, scenario.qubit);
  std::vector<int> holders(scenario.num_servers(), 0);
  TotalCost out;
  out.per_user.reserve(users);
  for (std::size_t u = 0; u < users; ++u) {
    const std::size_t e = action.server[u];
    if (e >= scenario.num_servers())
      throw LookupError("total_cost: unknown server " + std::to_string(e));
    const double phi = action.local_ratio[u];
    if (!(phi >= 0.0 && phi <= 1.0))
      throw ContractError("total_cost: local ratio outside [0, 1]");
    const UserEntry& entry = scenario.users[u];
    const double m = success_probability(entry.quantum.logical_qubits, entry.quantum.logical_depth,
                                         scenario.servers[e].level, device.error_rate,
                                         scenario.error_threshold);
    const bool on_qpu = action.quantum[u] != 0;
    if (on_qpu) {
      if (++holders[e] > 1)
        throw ContractError("total_cost: server " + std::to_string(e) +
                            " runs more than one quantum task");
      if (!quantum_feasible(entry.quantum, entry.profile, scenario.servers[e], m,
                            scenario.success_threshold))
        throw ContractError("total_cost: user " + std::to_string(u) +
                            " is not eligible for the QPU of server " + std::to_string(e));
    }
    out.per_user.push_back(user_breakdown(scenario, device, u, e, phi, on_qpu));
    out.success_prob.push_back(m);
    out.total += out.per_user.back().cost;
  }
  return out;
}

}  // namespace meqc
