#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "meqc/environment.hpp"
#include "meqc/mlp.hpp"
#include "meqc/rng.hpp"

namespace meqc {

using Net = Mlp<double>;

// Bounds of the continuous head's log standard deviation. The raw head
// output is mapped smoothly into [kLogStdMin, kLogStdMax] through tanh.
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// One agent: a categorical actor over servers with its critic, and a
/// sigmoid-squashed Gaussian actor over the local ratio with its critic.
/// The four networks read the same observation but share no parameters.
struct HybridPolicy {
  Net actor_discrete;     // obs -> E logits
  Net critic_discrete;    // obs -> V^a
  Net actor_continuous;   // obs -> (mean, raw log-std) of the pre-squash Gaussian
  Net critic_continuous;  // obs -> V^phi

  static HybridPolicy create(Eigen::Index observation_dim, std::size_t num_servers, int hidden,
                             Rng& rng, Activation activation = Activation::kTanh,
                             int hidden_layers = 2);

  std::size_t num_servers() const { return static_cast<std::size_t>(actor_discrete.output_size()); }
  std::vector<Net*> networks() { return {&actor_discrete, &critic_discrete, &actor_continuous, &critic_continuous}; }
  std::vector<const Net*> networks() const { return {&actor_discrete, &critic_discrete, &actor_continuous, &critic_continuous}; }
};

inline constexpr const char* kNetworkNames[4] = {"actor_discrete", "critic_discrete",
                                                  "actor_continuous", "critic_continuous"};

enum class SampleMode { kStochastic, kGreedy };

struct HybridSample {
  std::size_t server = 0;
  double local_ratio = 0.5;
  double pre_squash = 0.0;   // Gaussian sample before the sigmoid
  double logp_server = 0.0;
  double logp_ratio = 0.0;   // density of local_ratio on (0, 1), squash-corrected
  double value_discrete = 0.0;
  double value_continuous = 0.0;
};

double squash_log_std(double raw);
double sigmoid(double x);

// log of the density of phi = sigmoid(u), u ~ N(mean, exp(log_std)^2), at
// the point given by its pre-squash coordinate u.
double squashed_log_density(double pre_squash, double mean, double log_std);

// Categorical probabilities from logits (numerically stable softmax).
Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits);

HybridSample sample_hybrid_action(const HybridPolicy& policy, const Observation& obs, Rng& rng,
                                  SampleMode mode = SampleMode::kStochastic);

// Greedy-mode joint policy for evaluation.
std::vector<RawAction> act_greedy(std::span<const HybridPolicy> agents,
                                  std::span<const Observation> observations);

}  // namespace meqc
