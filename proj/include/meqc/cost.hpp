#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "meqc/device.hpp"
#include "meqc/scenario.hpp"

namespace meqc {

// Latency (s) and energy (J) per processing path plus the weighted scalar.
struct CostBreakdown {
  double d_local = 0.0;
  double d_transmit = 0.0;
  double d_edge = 0.0;
  double d_quantum = 0.0;
  double e_local = 0.0;
  double e_transmit = 0.0;
  double e_edge = 0.0;
  double e_quantum = 0.0;
  double cost = 0.0;
  double latency_cost = 0.0;  // lambda_D-weighted part of `cost`
  double energy_cost = 0.0;   // lambda_E-weighted part of `cost`

  double latency() const { return d_local + d_transmit + d_edge + d_quantum; }
  double energy() const { return e_local + e_transmit + e_edge + e_quantum; }
  CostBreakdown& operator+=(const CostBreakdown& o);
};

struct Transmission {
  double latency = 0.0;  // s
  double energy = 0.0;   // J
};

// One joint decision: server index (0-based) and local ratio per user, plus
// the QPU indicators once resolved.
struct JointAction {
  std::vector<std::size_t> server;
  std::vector<double> local_ratio;
  std::vector<std::uint8_t> quantum;

  std::size_t size() const { return server.size(); }
  static JointAction all_local(std::size_t users);
};

double uplink_rate(const UserProfile& user, std::span<const ServerProfile> servers,
                   std::size_t target);

CostBreakdown local_cost(const UserProfile& user, const TaskSpec& task, double local_ratio,
                         double chip_coefficient);

Transmission transmission_cost(const UserProfile& user, std::span<const ServerProfile> servers,
                               std::size_t target, const TaskSpec& task, double local_ratio);

// Offloaded share on the edge CPU, transmission included in `cost`.
CostBreakdown edge_classical_cost(const UserProfile& user, const TaskSpec& task,
                                  double local_ratio, double chip_coefficient,
                                  const Transmission& link);

// Offloaded share on the edge QPU, transmission included in `cost`.
CostBreakdown edge_quantum_cost(const UserProfile& user, const QuantumTaskSpec& qtask,
                                double local_ratio, const LogicalResources& resources,
                                const GatePowerProfile& powers, const QubitTech& tech,
                                const Transmission& link);

bool quantum_feasible(const QuantumTaskSpec& qtask, const UserProfile& user,
                      const ServerProfile& server, double success_prob,
                      double success_threshold = 2.0 / 3.0);

/// Per-user, per-server endpoint costs. Every per-user cost is affine in the
/// local ratio for a fixed (server, indicator), so the two endpoints
/// determine it everywhere.
class OffloadTable {
 public:
  explicit OffloadTable(const Scenario& scenario);

  std::size_t num_users() const { return local_.size(); }
  std::size_t num_servers() const { return num_servers_; }

  double local(std::size_t u) const { return local_[u]; }                  // c^L(1)
  double edge(std::size_t u, std::size_t e) const { return edge_(u, e); }  // c^E(0)
  double quantum(std::size_t u, std::size_t e) const { return quantum_(u, e); }  // c^Q(0)
  bool eligible(std::size_t u, std::size_t e) const { return eligible_(u, e) != 0; }
  double success(std::size_t u, std::size_t e) const { return success_(u, e); }

  // Cost of user u at ratio phi on server e with indicator `on_qpu`.
  double user_cost(std::size_t u, std::size_t e, bool on_qpu, double phi) const;

 private:
  std::size_t num_servers_;
  std::vector<double> local_;
  Eigen::MatrixXd edge_;
  Eigen::MatrixXd quantum_;
  Eigen::MatrixXd success_;
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> eligible_;
};

struct TotalCost {
  double total = 0.0;
  std::vector<CostBreakdown> per_user;
  std::vector<double> success_prob;  // M_u at the chosen server
};

// Sum over users of c^L + (1 - I) c^E + I c^Q. Throws ContractError if more
// than one user holds a server's QPU or an ineligible user holds one.
TotalCost total_cost(const Scenario& scenario, const JointAction& action);

// Full per-user breakdown on the active path.
CostBreakdown user_breakdown(const Scenario& scenario, const DeviceModel& device,
                             std::size_t u, std::size_t server, double local_ratio,
                             bool on_qpu);

}  // namespace meqc
