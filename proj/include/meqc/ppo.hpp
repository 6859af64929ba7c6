#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "meqc/environment.hpp"
#include "meqc/policy.hpp"
#include "meqc/solvers.hpp"

namespace meqc {

struct TrainConfig {
  int epochs = 500;
  int steps_per_epoch = 2000;
  int updates_per_epoch = 2;  // passes over the rollout per epoch
  int batch_size = 128;
  double discount = 0.95;
  double learning_rate = 1e-3;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.0;  // global gradient-norm clip; <= 0 disables it
  bool normalize_advantages = true;
  int hidden_units = 256;
  int hidden_layers = 2;
  double reward_scale = 0.0;  // divisor for rewards; 0 = mean |R| of the first rollout
  Arbitration arbitration = Arbitration::kLargestSaving;
  bool redraw_tasks = false;

  void validate() const;
};

/// Per-agent experience for one epoch. Observations are stored column-wise.
class RolloutBuffer {
 public:
  RolloutBuffer(Eigen::Index observation_dim, std::size_t capacity);

  void push(const Observation& obs, const HybridSample& sample, double reward);
  void clear();
  // Critic values at the observation following the last stored step.
  void finish(double bootstrap_discrete, double bootstrap_continuous);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return size_ == capacity_; }

  auto observations() const { return observations_.leftCols(static_cast<Eigen::Index>(size_)); }
  std::span<const std::size_t> servers() const { return {servers_.data(), size_}; }
  std::span<const double> pre_squash() const { return {pre_squash_.data(), size_}; }
  std::span<const double> logp_server() const { return {logp_server_.data(), size_}; }
  std::span<const double> logp_ratio() const { return {logp_ratio_.data(), size_}; }
  std::span<const double> rewards() const { return {rewards_.data(), size_}; }
  std::span<const double> values_discrete() const { return {values_discrete_.data(), size_}; }
  std::span<const double> values_continuous() const { return {values_continuous_.data(), size_}; }
  double bootstrap_discrete() const { return bootstrap_discrete_; }
  double bootstrap_continuous() const { return bootstrap_continuous_; }

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  Eigen::MatrixXd observations_;
  std::vector<std::size_t> servers_;
  std::vector<double> pre_squash_, logp_server_, logp_ratio_, rewards_, values_discrete_,
      values_continuous_;
  double bootstrap_discrete_ = 0.0;
  double bootstrap_continuous_ = 0.0;
};

struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;  // advantages + values
};

/// Generalized advantage estimation over a continuing trajectory:
/// delta_t = r_t + discount * V_{t+1} - V_t, A_t = sum_k (discount*lambda)^k delta_{t+k},
/// with V_T = bootstrap.
GaeResult gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
              double discount, double lambda);

// Zero mean, unit standard deviation (left centred if the spread is ~0).
void normalize_in_place(Eigen::Ref<Eigen::VectorXd> x);

// One minibatch worth of training targets.
struct PpoBatch {
  Eigen::MatrixXd observations;  // dim x B
  std::vector<std::size_t> servers;
  Eigen::VectorXd pre_squash;
  Eigen::VectorXd old_logp_server;
  Eigen::VectorXd old_logp_ratio;
  Eigen::VectorXd advantages_discrete;
  Eigen::VectorXd advantages_continuous;
  Eigen::VectorXd returns_discrete;
  Eigen::VectorXd returns_continuous;
};

struct PpoCoefficients {
  double clip_epsilon = 0.2;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
};

struct LossStats {
  double total = 0.0;
  double policy_loss = 0.0;  // negated clipped surrogates of both heads
  double value_loss = 0.0;   // squared errors of both critics
  double entropy = 0.0;      // categorical + pre-squash Gaussian
  double clip_fraction = 0.0;
};

// Gradient of the joint loss, one flat vector per network (same order as
// HybridPolicy::networks()).
using PolicyGradients = std::array<Eigen::VectorXd, 4>;

/// Joint loss: -(clipped surrogate, discrete) - (clipped surrogate, continuous)
/// + value_coef * (critic squared errors) - entropy_coef * entropy, averaged
/// over the batch. Fills `grads` when non-null.
LossStats ppo_loss(const HybridPolicy& policy, const PpoBatch& batch,
                   const PpoCoefficients& coef, PolicyGradients* grads = nullptr);

struct AgentOptimizer {
  std::vector<Adam<double>> nets;
  static AgentOptimizer create(const HybridPolicy& policy, double learning_rate);
};

/// Clipped-surrogate update of both heads and both critics from one full
/// rollout. Runs `updates_per_epoch` shuffled passes in minibatches.
LossStats ppo_update(HybridPolicy& policy, AgentOptimizer& optimizer, const RolloutBuffer& buffer,
                     const TrainConfig& cfg, double reward_scale, Rng& rng);

struct EpochStats {
  int epoch = 0;
  double mean_cost = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  std::vector<HybridPolicy> agents;
  std::vector<EpochStats> curve;
  double reward_scale = 0.0;
  bool halted = false;  // a non-finite update was rolled back
  std::string diagnostics;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Independent learners, one per user, on a shared environment.
TrainResult train(const Scenario& scenario, const TrainConfig& cfg, std::uint64_t seed,
                  const EpochCallback& on_epoch = {});

// Deterministic (argmax server, sigmoid(mean) ratio) policy from trained agents.
Policy make_learned_policy(std::vector<HybridPolicy> agents);

// Versioned checkpoint: text header line, JSON shape line, raw little-endian doubles.
void save_checkpoint(const std::string& path, std::span<const HybridPolicy> agents);
std::vector<HybridPolicy> load_checkpoint(const std::string& path);

}  // namespace meqc
