#include "meqc/policy.hpp"

#include <cmath>
#include <numbers>

namespace meqc {

namespace {

std::vector<int> layer_widths(Eigen::Index in, int hidden, int layers, int out) {
  std::vector<int> w{static_cast<int>(in)};
  for (int i = 0; i < layers; ++i) w.push_back(hidden);
  w.push_back(out);
  return w;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

HybridPolicy HybridPolicy::create(Eigen::Index observation_dim, std::size_t num_servers,
                                  int hidden, Rng& rng, Activation activation, int hidden_layers) {
  const int servers = static_cast<int>(num_servers);
  HybridPolicy p{Net(layer_widths(observation_dim, hidden, hidden_layers, servers), activation),
                 Net(layer_widths(observation_dim, hidden, hidden_layers, 1), activation),
                 Net(layer_widths(observation_dim, hidden, hidden_layers, 2), activation),
                 Net(layer_widths(observation_dim, hidden, hidden_layers, 1), activation)};
  // Near-uniform initial action distributions.
  p.actor_discrete.initialize(rng, 0.01);
  p.critic_discrete.initialize(rng);
  p.actor_continuous.initialize(rng, 0.01);
  p.critic_continuous.initialize(rng);
  return p;
}

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double squash_log_std(double raw) {
  return kLogStdMin + 0.5 * (kLogStdMax - kLogStdMin) * (std::tanh(raw) + 1.0);
}

double squashed_log_density(double pre_squash, double mean, double log_std) {
  const double z = (pre_squash - mean) * std::exp(-log_std);
  const double gaussian = -0.5 * z * z - log_std - 0.5 * std::log(2.0 * std::numbers::pi);
  // d phi / d u = phi (1 - phi); log of it is -softplus(-u) - softplus(u).
  const double log_jacobian = -softplus(-pre_squash) - softplus(pre_squash);
  return gaussian - log_jacobian;
}

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  const Eigen::VectorXd shifted = (logits.array() - logits.maxCoeff()).exp().matrix();
  return shifted / shifted.sum();
}

HybridSample sample_hybrid_action(const HybridPolicy& policy, const Observation& obs, Rng& rng,
                                  SampleMode mode) {
  HybridSample s;
  const Eigen::VectorXd logits = policy.actor_discrete.forward(obs);
  const Eigen::VectorXd probs = softmax(logits);
  if (mode == SampleMode::kGreedy) {
    Eigen::Index best = 0;
    probs.maxCoeff(&best);
    s.server = static_cast<std::size_t>(best);
  } else {
    s.server = rng.categorical(std::span<const double>(probs.data(), static_cast<std::size_t>(probs.size())));
  }
  s.logp_server = std::log(probs(static_cast<Eigen::Index>(s.server)));

  const Eigen::VectorXd head = policy.actor_continuous.forward(obs);
  const double mean = head(0);
  const double log_std = squash_log_std(head(1));
  s.pre_squash = mode == SampleMode::kGreedy ? mean : mean + std::exp(log_std) * rng.normal();
  s.local_ratio = sigmoid(s.pre_squash);
  s.logp_ratio = squashed_log_density(s.pre_squash, mean, log_std);

  s.value_discrete = policy.critic_discrete.forward(obs)(0, 0);
  s.value_continuous = policy.critic_continuous.forward(obs)(0, 0);
  return s;
}

std::vector<RawAction> act_greedy(std::span<const HybridPolicy> agents,
                                  std::span<const Observation> observations) {
  if (agents.size() != observations.size())
    throw ContractError("act_greedy: one observation per agent required");
  std::vector<RawAction> out(agents.size());
  Rng unused(0);
  for (std::size_t u = 0; u < agents.size(); ++u) {
    const HybridSample s = sample_hybrid_action(agents[u], observations[u], unused, SampleMode::kGreedy);
    out[u] = {s.server, s.local_ratio};
  }
  return out;
}

}  // namespace meqc
