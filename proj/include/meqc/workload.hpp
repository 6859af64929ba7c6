#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "meqc/rng.hpp"
#include "meqc/scenario.hpp"

namespace meqc {

// Ray-tracing job description. The scene holds 2^primitive_exponent primitives.
struct RayTracingParams {
  int primitive_exponent = 3;
  int coord_bits = 6;
  int frames = 1024;
  int resolution = 128 * 128;
  int rays_per_primitive = 3;

  void validate() const;
};

// Qubit width and circuit depth of the Grover-based intersection search.
QuantumTaskSpec compile_quantum(const RayTracingParams& params, const TaskSpec& task);

// Sampling ranges for scenario generation. Sets are listed explicitly.
struct ScenarioRanges {
  double gain_min = 4.0, gain_max = 8.0;
  double tx_power_min = 0.01e-3, tx_power_max = 0.2e-3;  // W
  double bandwidth = 20e6;                               // Hz
  double noise_power = 1e-6;                             // W
  std::vector<double> local_cpu = {1e9, 2e9, 3e9};
  std::vector<double> edge_cpu = {10e9, 15e9, 20e9};
  int physical_qubits_min = 1000, physical_qubits_max = 5000;
  std::vector<int> levels = {1, 2, 3};
  double data_size_min = 160e6, data_size_max = 1600e6;  // bytes
  int primitive_exponent_min = 3, primitive_exponent_max = 9;
  int coord_bits = 6;
  int frames_min = 1024, frames_max = 10240;
  double weight_latency = 0.5, weight_energy = 0.5;

  void validate() const;
};

// Field tags for keyed draws. Values are part of the reproducibility
// contract; append new tags, never renumber.
enum class Field : std::uint64_t {
  kDataSize = 1,
  kPrimitiveExponent = 2,
  kFrames = 3,
  kLocalCpu = 4,
  kEdgeCpu = 5,
  kTxPower = 6,
  kChannelGain = 7,
  kPhysicalQubits = 8,
  kLevel = 9,
};

// Draws the primitive exponent and frame count for user `index`.
RayTracingParams gen_ray_tracing(const KeyedRng& rng, std::size_t index,
                                 const ScenarioRanges& ranges = {});

// Draws the classical task for a given ray-tracing job.
TaskSpec gen_task(const RayTracingParams& params, const KeyedRng& rng, std::size_t index,
                  const ScenarioRanges& ranges = {});

// Redraws the user's task and compiled footprint in place.
void redraw_task(UserEntry& user, const KeyedRng& rng, std::size_t index,
                 const ScenarioRanges& ranges = {});

Scenario gen_scenario(std::size_t num_users, std::size_t num_servers, std::uint64_t seed,
                      const ScenarioRanges& ranges = {});

// Re-derives each user's subscribed logical qubits from the current servers.
void refresh_subscriptions(Scenario& scenario);

// Scenario document (JSON, versioned). See docs/scenario_format.md.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace meqc
