#include "meqc/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "meqc/errors.hpp"

namespace meqc {

void RayTracingParams::validate() const {
  if (primitive_exponent < 3 || primitive_exponent > 9)
    throw ConfigError("ray tracing: primitive_exponent must be in [3, 9]");
  if (coord_bits < 1) throw ConfigError("ray tracing: coord_bits must be >= 1");
  if (frames < 1024 || frames > 10240) throw ConfigError("ray tracing: frames must be in [1024, 10240]");
  if (resolution < 1 || rays_per_primitive < 1)
    throw ConfigError("ray tracing: resolution and rays_per_primitive must be >= 1");
}

QuantumTaskSpec compile_quantum(const RayTracingParams& params, const TaskSpec& task) {
  if (params.primitive_exponent < 0 || params.coord_bits < 0)
    throw ConfigError("compile_quantum: register widths must be >= 0");
  const int search_bits = params.primitive_exponent + 2 * params.coord_bits + 5;
  QuantumTaskSpec q;
  q.data_size = task.data_size;
  q.logical_qubits = search_bits;
  // Grover iterations over the full search register.
  const double iterations = std::floor(std::numbers::pi / 4.0 * std::sqrt(std::ldexp(1.0, search_bits)));
  q.logical_depth = 3 * params.primitive_exponent + static_cast<int>(iterations);
  return q;
}

void ScenarioRanges::validate() const {
  if (!(gain_min > 0.0) || gain_max < gain_min) throw ConfigError("ranges: bad channel gain range");
  if (!(tx_power_min > 0.0) || tx_power_max < tx_power_min)
    throw ConfigError("ranges: bad tx power range");
  if (!(bandwidth > 0.0)) throw ConfigError("ranges: bandwidth must be > 0");
  if (!(noise_power > 0.0)) throw ConfigError("ranges: noise_power must be > 0");
  if (local_cpu.empty() || edge_cpu.empty() || levels.empty())
    throw ConfigError("ranges: value sets must be non-empty");
  for (double f : local_cpu)
    if (!(f > 0.0)) throw ConfigError("ranges: local_cpu values must be > 0");
  for (double f : edge_cpu)
    if (!(f > 0.0)) throw ConfigError("ranges: edge_cpu values must be > 0");
  for (int k : levels)
    if (k < 1 || k > 3) throw ConfigError("ranges: levels must be in {1, 2, 3}");
  if (physical_qubits_min < 0 || physical_qubits_max < physical_qubits_min)
    throw ConfigError("ranges: bad physical qubit range");
  if (!(data_size_min > 0.0) || data_size_max < data_size_min)
    throw ConfigError("ranges: bad data size range");
  if (primitive_exponent_min < 3 || primitive_exponent_max > 9 ||
      primitive_exponent_max < primitive_exponent_min)
    throw ConfigError("ranges: primitive exponents must lie in [3, 9]");
  if (coord_bits < 1) throw ConfigError("ranges: coord_bits must be >= 1");
  if (weight_latency < 0.0 || weight_latency > 1.0 || weight_energy < 0.0 || weight_energy > 1.0)
    throw ConfigError("ranges: weights must lie in [0, 1]");
}

namespace {

constexpr std::uint64_t tag(Field f) { return static_cast<std::uint64_t>(f); }

template <typename T>
T pick(const std::vector<T>& set, const KeyedRng& rng, Field f, std::size_t index,
       std::uint64_t draw = 0) {
  const auto i = rng.uniform_int(0, static_cast<std::int64_t>(set.size()) - 1, tag(f), index, draw);
  return set[static_cast<std::size_t>(i)];
}

}  // namespace

RayTracingParams gen_ray_tracing(const KeyedRng& rng, std::size_t index,
                                 const ScenarioRanges& ranges) {
  RayTracingParams p;
  p.primitive_exponent = static_cast<int>(rng.uniform_int(
      ranges.primitive_exponent_min, ranges.primitive_exponent_max, tag(Field::kPrimitiveExponent), index));
  p.coord_bits = ranges.coord_bits;
  p.frames = static_cast<int>(
      rng.uniform_int(ranges.frames_min, ranges.frames_max, tag(Field::kFrames), index));
  return p;
}

TaskSpec gen_task(const RayTracingParams& params, const KeyedRng& rng, std::size_t index,
                  const ScenarioRanges& ranges) {
  TaskSpec t;
  t.data_size = rng.uniform(ranges.data_size_min, ranges.data_size_max, tag(Field::kDataSize), index);
  t.cycles_per_byte = 3.0 * std::ldexp(1.0, params.primitive_exponent);
  return t;
}

void redraw_task(UserEntry& user, const KeyedRng& rng, std::size_t index,
                 const ScenarioRanges& ranges) {
  const RayTracingParams params = gen_ray_tracing(rng, index, ranges);
  user.task = gen_task(params, rng, index, ranges);
  user.quantum = compile_quantum(params, user.task);
  user.primitive_exponent = params.primitive_exponent;
}

void refresh_subscriptions(Scenario& scenario) {
  int best = 0;
  for (const auto& s : scenario.servers) best = std::max(best, s.logical_capacity());
  for (auto& u : scenario.users) u.profile.subscribed_logical_qubits = best;
}

Scenario gen_scenario(std::size_t num_users, std::size_t num_servers, std::uint64_t seed,
                      const ScenarioRanges& ranges) {
  if (num_users < 1 || num_servers < 1)
    throw ConfigError("gen_scenario: need at least one user and one server");
  ranges.validate();
  const KeyedRng rng(seed);

  Scenario sc;
  sc.seed = seed;
  sc.servers.resize(num_servers);
  for (std::size_t e = 0; e < num_servers; ++e) {
    ServerProfile& s = sc.servers[e];
    s.bandwidth = ranges.bandwidth;
    s.noise_power = ranges.noise_power;
    s.level = pick(ranges.levels, rng, Field::kLevel, e);
    s.physical_qubits = static_cast<int>(rng.uniform_int(
        ranges.physical_qubits_min, ranges.physical_qubits_max, tag(Field::kPhysicalQubits), e));
  }

  sc.users.resize(num_users);
  for (std::size_t u = 0; u < num_users; ++u) {
    UserEntry& entry = sc.users[u];
    UserProfile& p = entry.profile;
    p.f_local = pick(ranges.local_cpu, rng, Field::kLocalCpu, u);
    p.edge_cpu = pick(ranges.edge_cpu, rng, Field::kEdgeCpu, u);
    p.tx_power = rng.uniform(ranges.tx_power_min, ranges.tx_power_max, tag(Field::kTxPower), u);
    p.weight_latency = ranges.weight_latency;
    p.weight_energy = ranges.weight_energy;
    p.channel_gains.resize(static_cast<Eigen::Index>(num_servers));
    for (std::size_t e = 0; e < num_servers; ++e)
      p.channel_gains(static_cast<Eigen::Index>(e)) =
          rng.uniform(ranges.gain_min, ranges.gain_max, tag(Field::kChannelGain), u, e);
    redraw_task(entry, rng, u, ranges);
  }
  refresh_subscriptions(sc);

  // Normalization divisors follow the sampling ranges.
  ObservationScales& sc_scales = sc.scales;
  sc_scales.f_local = *std::max_element(ranges.local_cpu.begin(), ranges.local_cpu.end());
  sc_scales.edge_cpu = *std::max_element(ranges.edge_cpu.begin(), ranges.edge_cpu.end());
  sc_scales.data_size = ranges.data_size_max;
  sc_scales.cycles_per_byte = 3.0 * std::ldexp(1.0, ranges.primitive_exponent_max);
  RayTracingParams widest;
  widest.primitive_exponent = ranges.primitive_exponent_max;
  widest.coord_bits = ranges.coord_bits;
  const QuantumTaskSpec top = compile_quantum(widest, TaskSpec{});
  sc_scales.logical_qubits = top.logical_qubits;
  sc_scales.logical_depth = top.logical_depth;
  const int min_level = *std::min_element(ranges.levels.begin(), ranges.levels.end());
  sc_scales.logical_capacity =
      std::max(1.0, std::floor(ranges.physical_qubits_max / std::pow(91.0, min_level)));
  sc_scales.level = *std::max_element(ranges.levels.begin(), ranges.levels.end());
  sc_scales.tx_power = ranges.tx_power_max;
  sc_scales.channel_gain = ranges.gain_max;
  return sc;
}

void Scenario::validate() const {
  if (users.empty() || servers.empty())
    throw ConfigError("scenario: need at least one user and one server");
  for (const auto& s : servers) s.validate();
  for (const auto& u : users) {
    u.profile.validate(static_cast<Eigen::Index>(servers.size()));
    u.task.validate();
    u.quantum.validate();
  }
  cryostat.validate();
  qubit.validate();
  if (!(chip_coefficient >= 0.0)) throw ConfigError("scenario: chip_coefficient must be >= 0");
  if (!(error_threshold > 0.0)) throw ConfigError("scenario: error_threshold must be > 0");
  if (!(success_threshold >= 0.0 && success_threshold <= 1.0))
    throw ConfigError("scenario: success_threshold must be in [0, 1]");
}

}  // namespace meqc
