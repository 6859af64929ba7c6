#include "meqc/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace meqc {

void TrainConfig::validate() const {
  if (epochs < 1 || steps_per_epoch < 1 || updates_per_epoch < 1 || batch_size < 1)
    throw ConfigError("train: epochs, steps_per_epoch, updates_per_epoch, batch_size must be >= 1");
  if (!(discount >= 0.0 && discount <= 1.0)) throw ConfigError("train: discount must be in [0, 1]");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw ConfigError("train: gae_lambda must be in [0, 1]");
  if (!(learning_rate >= 0.0)) throw ConfigError("train: learning_rate must be >= 0");
  if (!(clip_epsilon > 0.0)) throw ConfigError("train: clip_epsilon must be > 0");
  if (entropy_coef < 0.0 || value_coef < 0.0) throw ConfigError("train: coefficients must be >= 0");
  if (hidden_units < 1 || hidden_layers < 1) throw ConfigError("train: network size must be >= 1");
  if (reward_scale < 0.0) throw ConfigError("train: reward_scale must be >= 0");
}

RolloutBuffer::RolloutBuffer(Eigen::Index observation_dim, std::size_t capacity)
    : capacity_(capacity),
      observations_(observation_dim, static_cast<Eigen::Index>(capacity)),
      servers_(capacity),
      pre_squash_(capacity),
      logp_server_(capacity),
      logp_ratio_(capacity),
      rewards_(capacity),
      values_discrete_(capacity),
      values_continuous_(capacity) {}

void RolloutBuffer::push(const Observation& obs, const HybridSample& s, double reward) {
  if (full()) throw ContractError("RolloutBuffer::push: buffer is full");
  if (obs.size() != observations_.rows())
    throw ContractError("RolloutBuffer::push: observation size mismatch");
  const std::size_t i = size_++;
  observations_.col(static_cast<Eigen::Index>(i)) = obs;
  servers_[i] = s.server;
  pre_squash_[i] = s.pre_squash;
  logp_server_[i] = s.logp_server;
  logp_ratio_[i] = s.logp_ratio;
  rewards_[i] = reward;
  values_discrete_[i] = s.value_discrete;
  values_continuous_[i] = s.value_continuous;
}

void RolloutBuffer::clear() {
  size_ = 0;
  bootstrap_discrete_ = bootstrap_continuous_ = 0.0;
}

void RolloutBuffer::finish(double bootstrap_discrete, double bootstrap_continuous) {
  bootstrap_discrete_ = bootstrap_discrete;
  bootstrap_continuous_ = bootstrap_continuous;
}

GaeResult gae(std::span<const double> rewards, std::span<const double> values, double bootstrap,
              double discount, double lambda) {
  if (rewards.size() != values.size()) throw ContractError("gae: rewards and values differ in length");
  const auto n = static_cast<Eigen::Index>(rewards.size());
  GaeResult out{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  double running = 0.0;
  double next_value = bootstrap;
  for (Eigen::Index t = n; t-- > 0;) {
    const auto i = static_cast<std::size_t>(t);
    const double delta = rewards[i] + discount * next_value - values[i];
    running = delta + discount * lambda * running;
    out.advantages(t) = running;
    out.returns(t) = running + values[i];
    next_value = values[i];
  }
  return out;
}

void normalize_in_place(Eigen::Ref<Eigen::VectorXd> x) {
  if (x.size() == 0) return;
  const double mean = x.mean();
  x.array() -= mean;
  if (x.size() < 2) return;
  const double sd = std::sqrt(x.squaredNorm() / static_cast<double>(x.size() - 1));
  if (sd > 1e-8) x /= sd;
}

namespace {

constexpr double kHalfLog2PiE = 0.5 * 1.8378770664093453 + 0.5;  // 0.5 log(2 pi) + 0.5

// Derivative of min(r A, clip(r) A) with respect to log r; zero when the
// clipped branch is strictly smaller.
double surrogate(double ratio, double adv, double eps, double* dlogp, bool* clipped) {
  const double unclipped = ratio * adv;
  const double clipped_v = std::clamp(ratio, 1.0 - eps, 1.0 + eps) * adv;
  if (unclipped <= clipped_v) {
    *dlogp = unclipped;
    *clipped = false;
    return unclipped;
  }
  *dlogp = 0.0;
  *clipped = true;
  return clipped_v;
}

}  // namespace

LossStats ppo_loss(const HybridPolicy& policy, const PpoBatch& batch, const PpoCoefficients& coef,
                   PolicyGradients* grads) {
  const Eigen::Index n = batch.observations.cols();
  if (n == 0) throw ContractError("ppo_loss: empty batch");
  if (static_cast<Eigen::Index>(batch.servers.size()) != n || batch.pre_squash.size() != n ||
      batch.old_logp_server.size() != n || batch.old_logp_ratio.size() != n ||
      batch.advantages_discrete.size() != n || batch.advantages_continuous.size() != n ||
      batch.returns_discrete.size() != n || batch.returns_continuous.size() != n)
    throw ContractError("ppo_loss: batch fields are misaligned");

  std::array<Net::Tape, 4> tapes;
  const Eigen::MatrixXd logits = policy.actor_discrete.forward(batch.observations, &tapes[0]);
  const Eigen::MatrixXd v_discrete = policy.critic_discrete.forward(batch.observations, &tapes[1]);
  const Eigen::MatrixXd head = policy.actor_continuous.forward(batch.observations, &tapes[2]);
  const Eigen::MatrixXd v_continuous = policy.critic_continuous.forward(batch.observations, &tapes[3]);

  Eigen::MatrixXd up_logits(logits.rows(), n);
  Eigen::MatrixXd up_head(2, n);
  Eigen::MatrixXd up_vd(1, n);
  Eigen::MatrixXd up_vc(1, n);

  LossStats s;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double log_std_span = 0.5 * (kLogStdMax - kLogStdMin);
  std::size_t clipped_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto a = static_cast<Eigen::Index>(batch.servers[static_cast<std::size_t>(i)]);
    if (a >= logits.rows()) throw ContractError("ppo_loss: server index out of range");

    // Discrete head.
    const Eigen::VectorXd z = logits.col(i);
    const double zmax = z.maxCoeff();
    const double lse = zmax + std::log((z.array() - zmax).exp().sum());
    const Eigen::VectorXd logp = z.array() - lse;
    const Eigen::VectorXd p = logp.array().exp();
    const double entropy_d = -(p.array() * logp.array()).sum();
    const double ratio_d = std::exp(logp(a) - batch.old_logp_server(i));
    double d_logp_d = 0.0;
    bool clip_d = false;
    const double surr_d = surrogate(ratio_d, batch.advantages_discrete(i), coef.clip_epsilon,
                                    &d_logp_d, &clip_d);

    // Continuous head.
    const double mean = head(0, i);
    const double raw = head(1, i);
    const double log_std = squash_log_std(raw);
    const double u = batch.pre_squash(i);
    const double logp_c = squashed_log_density(u, mean, log_std);
    const double entropy_c = log_std + kHalfLog2PiE;
    const double ratio_c = std::exp(logp_c - batch.old_logp_ratio(i));
    double d_logp_c = 0.0;
    bool clip_c = false;
    const double surr_c = surrogate(ratio_c, batch.advantages_continuous(i), coef.clip_epsilon,
                                    &d_logp_c, &clip_c);

    const double err_d = v_discrete(0, i) - batch.returns_discrete(i);
    const double err_c = v_continuous(0, i) - batch.returns_continuous(i);

    s.policy_loss += -(surr_d + surr_c) * inv_n;
    s.value_loss += (err_d * err_d + err_c * err_c) * inv_n;
    s.entropy += (entropy_d + entropy_c) * inv_n;
    clipped_count += static_cast<std::size_t>(clip_d) + static_cast<std::size_t>(clip_c);

    if (grads) {
      // dL/dz = -d_logp_d (onehot - p) - entropy_coef dH/dz,  dH/dz_j = -p_j (logp_j + H)
      Eigen::VectorXd g = d_logp_d * p;
      g(a) -= d_logp_d;
      g.array() += coef.entropy_coef * p.array() * (logp.array() + entropy_d);
      up_logits.col(i) = g * inv_n;

      const double inv_var = std::exp(-2.0 * log_std);
      const double diff = u - mean;
      const double dlogp_dmean = diff * inv_var;
      const double dlogp_dlogstd = diff * diff * inv_var - 1.0;
      const double t = std::tanh(raw);
      const double dlogstd_draw = log_std_span * (1.0 - t * t);
      up_head(0, i) = -d_logp_c * dlogp_dmean * inv_n;
      up_head(1, i) = (-d_logp_c * dlogp_dlogstd - coef.entropy_coef) * dlogstd_draw * inv_n;

      up_vd(0, i) = 2.0 * coef.value_coef * err_d * inv_n;
      up_vc(0, i) = 2.0 * coef.value_coef * err_c * inv_n;
    }
  }
  s.clip_fraction = static_cast<double>(clipped_count) / (2.0 * static_cast<double>(n));
  s.total = s.policy_loss + coef.value_coef * s.value_loss - coef.entropy_coef * s.entropy;
  if (!std::isfinite(s.total)) {
    std::ostringstream msg;
    msg << "ppo_loss: non-finite loss (policy " << s.policy_loss << ", value " << s.value_loss
        << ", entropy " << s.entropy << ")";
    throw TrainingError(msg.str());
  }

  if (grads) {
    (*grads)[0] = policy.actor_discrete.backward(tapes[0], up_logits);
    (*grads)[1] = policy.critic_discrete.backward(tapes[1], up_vd);
    (*grads)[2] = policy.actor_continuous.backward(tapes[2], up_head);
    (*grads)[3] = policy.critic_continuous.backward(tapes[3], up_vc);
  }
  return s;
}

AgentOptimizer AgentOptimizer::create(const HybridPolicy& policy, double learning_rate) {
  AgentOptimizer o;
  for (const Net* net : policy.networks()) o.nets.emplace_back(net->num_params(), learning_rate);
  return o;
}

LossStats ppo_update(HybridPolicy& policy, AgentOptimizer& optimizer, const RolloutBuffer& buffer,
                     const TrainConfig& cfg, double reward_scale, Rng& rng) {
  if (buffer.size() == 0) throw ContractError("ppo_update: empty rollout buffer");
  if (!(reward_scale > 0.0)) throw ContractError("ppo_update: reward_scale must be > 0");
  const std::size_t n = buffer.size();

  std::vector<double> rewards(buffer.rewards().begin(), buffer.rewards().end());
  for (double& r : rewards) r /= reward_scale;
  const GaeResult disc = gae(rewards, buffer.values_discrete(), buffer.bootstrap_discrete(),
                             cfg.discount, cfg.gae_lambda);
  const GaeResult cont = gae(rewards, buffer.values_continuous(), buffer.bootstrap_continuous(),
                             cfg.discount, cfg.gae_lambda);

  const PpoCoefficients coef{cfg.clip_epsilon, cfg.entropy_coef, cfg.value_coef};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto obs = buffer.observations();
  std::vector<Net*> nets = policy.networks();

  LossStats mean;
  int batches = 0;
  for (int pass = 0; pass < cfg.updates_per_epoch; ++pass) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const auto m = static_cast<Eigen::Index>(stop - start);
      PpoBatch b;
      b.observations.resize(obs.rows(), m);
      b.servers.resize(static_cast<std::size_t>(m));
      b.pre_squash.resize(m);
      b.old_logp_server.resize(m);
      b.old_logp_ratio.resize(m);
      b.advantages_discrete.resize(m);
      b.advantages_continuous.resize(m);
      b.returns_discrete.resize(m);
      b.returns_continuous.resize(m);
      for (Eigen::Index j = 0; j < m; ++j) {
        const std::size_t k = order[start + static_cast<std::size_t>(j)];
        const auto kk = static_cast<Eigen::Index>(k);
        b.observations.col(j) = obs.col(kk);
        b.servers[static_cast<std::size_t>(j)] = buffer.servers()[k];
        b.pre_squash(j) = buffer.pre_squash()[k];
        b.old_logp_server(j) = buffer.logp_server()[k];
        b.old_logp_ratio(j) = buffer.logp_ratio()[k];
        b.advantages_discrete(j) = disc.advantages(kk);
        b.advantages_continuous(j) = cont.advantages(kk);
        b.returns_discrete(j) = disc.returns(kk);
        b.returns_continuous(j) = cont.returns(kk);
      }
      if (cfg.normalize_advantages) {
        normalize_in_place(b.advantages_discrete);
        normalize_in_place(b.advantages_continuous);
      }

      PolicyGradients g;
      const LossStats s = ppo_loss(policy, b, coef, &g);
      if (cfg.max_grad_norm > 0.0) {
        double sq = 0.0;
        for (const auto& gi : g) sq += gi.squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > cfg.max_grad_norm)
          for (auto& gi : g) gi *= cfg.max_grad_norm / norm;
      }
      for (std::size_t k = 0; k < nets.size(); ++k) optimizer.nets[k].step(nets[k]->params(), g[k]);

      mean.total += s.total;
      mean.policy_loss += s.policy_loss;
      mean.value_loss += s.value_loss;
      mean.entropy += s.entropy;
      mean.clip_fraction += s.clip_fraction;
      ++batches;
    }
  }
  for (double* f : {&mean.total, &mean.policy_loss, &mean.value_loss, &mean.entropy, &mean.clip_fraction})
    *f /= batches;
  for (Net* net : nets)
    if (!net->params().allFinite()) throw TrainingError("ppo_update: non-finite parameters after update");
  return mean;
}

TrainResult train(const Scenario& scenario, const TrainConfig& cfg, std::uint64_t seed,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  Environment env(scenario, EnvConfig{cfg.arbitration, cfg.redraw_tasks});
  Rng rng(seed);
  const std::size_t agents = env.num_agents();

  TrainResult result;
  std::vector<AgentOptimizer> optimizers;
  std::vector<RolloutBuffer> buffers;
  for (std::size_t u = 0; u < agents; ++u) {
    result.agents.push_back(HybridPolicy::create(env.observation_dim(), env.num_servers(),
                                                 cfg.hidden_units, rng, Activation::kTanh,
                                                 cfg.hidden_layers));
    optimizers.push_back(AgentOptimizer::create(result.agents.back(), cfg.learning_rate));
    buffers.emplace_back(env.observation_dim(), static_cast<std::size_t>(cfg.steps_per_epoch));
  }
  double reward_scale = cfg.reward_scale;

  std::vector<Observation> obs = env.reset();
  std::vector<HybridSample> samples(agents);
  std::vector<RawAction> actions(agents);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& b : buffers) b.clear();
    double cost_sum = 0.0;
    for (int step = 0; step < cfg.steps_per_epoch; ++step) {
      for (std::size_t u = 0; u < agents; ++u) {
        samples[u] = sample_hybrid_action(result.agents[u], obs[u], rng);
        actions[u] = {samples[u].server, samples[u].local_ratio};
      }
      StepResult r = env.step(actions);
      cost_sum += r.info.total;
      for (std::size_t u = 0; u < agents; ++u) buffers[u].push(obs[u], samples[u], r.reward);
      obs = std::move(r.observations);
    }
    for (std::size_t u = 0; u < agents; ++u) {
      const HybridPolicy& p = result.agents[u];
      buffers[u].finish(p.critic_discrete.forward(obs[u])(0, 0),
                        p.critic_continuous.forward(obs[u])(0, 0));
    }
    const double mean_cost = cost_sum / cfg.steps_per_epoch;
    if (!(reward_scale > 0.0)) reward_scale = mean_cost > 0.0 ? mean_cost : 1.0;

    const std::vector<HybridPolicy> last_good = result.agents;
    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_cost = mean_cost;
    try {
      for (std::size_t u = 0; u < agents; ++u) {
        const LossStats s = ppo_update(result.agents[u], optimizers[u], buffers[u], cfg,
                                       reward_scale, rng);
        stats.policy_loss += s.policy_loss / static_cast<double>(agents);
        stats.value_loss += s.value_loss / static_cast<double>(agents);
        stats.entropy += s.entropy / static_cast<double>(agents);
      }
    } catch (const TrainingError& e) {
      result.agents = last_good;
      result.halted = true;
      result.diagnostics = "epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }
    result.curve.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  result.reward_scale = reward_scale;
  return result;
}

Policy make_learned_policy(std::vector<HybridPolicy> agents) {
  return [agents = std::move(agents)](const Environment&, std::span<const Observation> obs, Rng&) {
    return act_greedy(agents, obs);
  };
}

}  // namespace meqc
