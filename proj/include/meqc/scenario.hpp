#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "meqc/device.hpp"

namespace meqc {

struct UserProfile {
  double f_local = 2e9;         // cycles/s
  double tx_power = 1e-4;       // W
  double weight_latency = 0.5;  // lambda_D
  double weight_energy = 0.5;   // lambda_E
  Eigen::VectorXd channel_gains;  // linear, one entry per server
  double edge_cpu = 15e9;       // subscribed edge cycles/s
  int subscribed_logical_qubits = 0;

  void validate(Eigen::Index num_servers) const;
};

// Classical task: s_u bytes at n_u cycles per byte.
struct TaskSpec {
  double data_size = 160e6;
  double cycles_per_byte = 24.0;

  double cycles() const { return data_size * cycles_per_byte; }
  void validate() const;
};

// Compiled quantum footprint of a task.
struct QuantumTaskSpec {
  double data_size = 160e6;
  int logical_qubits = 20;
  int logical_depth = 813;

  double error_locations() const {
    return static_cast<double>(logical_qubits) * static_cast<double>(logical_depth);
  }
  void validate() const;
};

struct ServerProfile {
  double noise_power = 1e-6;  // W
  double bandwidth = 20e6;    // Hz
  int level = 1;              // concatenation level k
  int physical_qubits = 1000;

  // Logical qubits the server can host at its concatenation level.
  int logical_capacity() const;
  void validate() const;
};

// Fixed divisors mapping each observation field into [0, 1].
struct ObservationScales {
  double f_local = 3e9;
  double data_size = 1600e6;
  double cycles_per_byte = 1536.0;
  double logical_qubits = 26.0;
  double logical_depth = 6460.0;
  double edge_cpu = 20e9;
  double logical_capacity = 54.0;
  double level = 3.0;
  double tx_power = 0.2e-3;
  double channel_gain = 8.0;
};

struct UserEntry {
  UserProfile profile;
  TaskSpec task;
  QuantumTaskSpec quantum;
  int primitive_exponent = 3;
};

struct Scenario {
  static constexpr int kSchemaVersion = 1;

  std::vector<UserEntry> users;
  std::vector<ServerProfile> servers;
  CryostatConfig cryostat;
  QubitTech qubit;
  double chip_coefficient = 1e-11;   // J/cycle
  double error_threshold = 2e-4;     // eps_thr
  double success_threshold = 2.0 / 3.0;
  ObservationScales scales;
  std::uint64_t seed = 0;

  std::size_t num_users() const { return users.size(); }
  std::size_t num_servers() const { return servers.size(); }
  void validate() const;
};

}  // namespace meqc
