#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "meqc/cost.hpp"
#include "meqc/rng.hpp"
#include "meqc/scenario.hpp"

namespace meqc {

using Observation = Eigen::VectorXd;

// What an agent emits before QPU arbitration.
struct RawAction {
  std::size_t server = 0;
  double local_ratio = 1.0;
};

// How a contended QPU is assigned among eligible users of one server.
enum class Arbitration {
  kLargestSaving,  // max (c^E - c^Q), ties to the lowest user index
  kFirstIndex,     // lowest user index with a positive saving
};

struct EnvConfig {
  Arbitration arbitration = Arbitration::kLargestSaving;
  bool redraw_tasks = false;  // fresh tasks on every reset()
};

struct StepResult {
  std::vector<Observation> observations;
  double reward = 0.0;  // -C, shared by all agents
  JointAction action;   // clamped ratios and resolved indicators
  TotalCost info;
};

// 5 local + (2 + E) edge + (1 + E) wireless fields.
inline Eigen::Index observation_size(std::size_t num_servers) {
  return static_cast<Eigen::Index>(8 + 2 * num_servers);
}

Observation observe(const Scenario& scenario, std::size_t user);

/// Grants each server's QPU to at most one user. A user is a candidate when it
/// chose the server, is eligible there, and moving its offloaded share to
/// the QPU strictly lowers its cost.
std::vector<std::uint8_t> resolve_quantum_allocation(const OffloadTable& table,
                                                     std::span<const std::size_t> servers,
                                                     std::span<const double> local_ratios,
                                                     Arbitration rule = Arbitration::kLargestSaving);

class Environment {
 public:
  explicit Environment(Scenario scenario, EnvConfig config = {});

  std::vector<Observation> reset();
  StepResult step(std::span<const RawAction> actions);

  const Scenario& scenario() const { return scenario_; }
  const OffloadTable& table() const { return table_; }
  const EnvConfig& config() const { return config_; }
  std::size_t num_agents() const { return scenario_.num_users(); }
  std::size_t num_servers() const { return scenario_.num_servers(); }
  Eigen::Index observation_dim() const { return observation_size(scenario_.num_servers()); }

 private:
  std::vector<Observation> observations() const;

  Scenario scenario_;
  EnvConfig config_;
  OffloadTable table_;
  std::uint64_t episode_ = 0;
  bool ready_ = false;
};

// Per-step debug dump: one CSV line per (step, user).
class TrajectoryWriter {
 public:
  TrajectoryWriter(std::ostream& out, Eigen::Index observation_dim);
  void write(std::uint64_t step, std::span<const Observation> observations,
             const StepResult& result);

 private:
  std::ostream& out_;
};

}  // namespace meqc
