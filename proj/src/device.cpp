#include "meqc/device.hpp"

#include <algorithm>
#include <string>

namespace meqc {

void CryostatConfig::validate() const {
  if (num_stages < 2) throw ConfigError("cryostat: num_stages must be >= 2");
  if (!(t_qubit > 0.0) || !(t_qubit < t_gen))
    throw ConfigError("cryostat: require 0 < t_qubit < t_gen");
  if (!(total_attenuation_db >= 0.0) || !std::isfinite(total_attenuation_db))
    throw ConfigError("cryostat: total_attenuation_db must be finite and >= 0");
  if (heat_gen < 0.0 || heat_hemt < 0.0 || heat_para < 0.0)
    throw ConfigError("cryostat: heat loads must be >= 0");
  if (!(t_hemt > 0.0) || !(t_para > 0.0))
    throw ConfigError("cryostat: amplifier temperatures must be > 0");
}

void QubitTech::validate() const {
  if (!(frequency > 0.0)) throw ConfigError("qubit: frequency must be > 0");
  if (!(decoherence_time > 0.0)) throw ConfigError("qubit: decoherence_time must be > 0");
  if (!(tau_1qb > 0.0) || !(tau_2qb > 0.0) || !(tau_meas > 0.0) || !(tau_step > 0.0))
    throw ConfigError("qubit: gate times must be > 0");
  if (tau_step < std::max({tau_1qb, tau_2qb, tau_meas}))
    throw ConfigError("qubit: tau_step must cover the slowest gate");
}

StageProfile cryostat_stages(const CryostatConfig& cfg) {
  cfg.validate();
  const int k = cfg.num_stages;
  const double span = static_cast<double>(k - 1);
  const double total = std::pow(10.0, cfg.total_attenuation_db / 10.0);

  StageProfile out;
  out.temperature.resize(k);
  out.cumulative.resize(k);
  out.attenuator_ratio = std::pow(total, 1.0 / span);
  const double ratio = cfg.t_gen / cfg.t_qubit;
  for (int i = 0; i < k; ++i) {
    out.temperature(i) = cfg.t_qubit * std::pow(ratio, i / span);
    out.cumulative(i) = std::pow(total, i / span);
  }
  // Pin the endpoints so they hold exactly.
  out.temperature(k - 1) = cfg.t_gen;
  out.cumulative(k - 1) = total;
  return out;
}

namespace {

double photon_sum(const StageProfile& stages, double frequency) {
  const Eigen::Index k = stages.size();
  Eigen::VectorXd n(k);
  for (Eigen::Index i = 0; i < k; ++i) n(i) = bose_einstein(stages.temperature(i), frequency);
  // Photons leaking in from stage i+1 cross i attenuators.
  double sum = 0.5 + n(0);
  for (Eigen::Index i = 1; i < k; ++i) sum += (n(i) - n(i - 1)) / stages.cumulative(i);
  return sum;
}

}  // namespace

double physical_error_rate(const CryostatConfig& cfg, const QubitTech& tech) {
  tech.validate();
  const StageProfile stages = cryostat_stages(cfg);
  const double eps = 0.5 * tech.decay_rate() * tech.tau_step * photon_sum(stages, tech.frequency);
  return std::clamp(eps, 0.0, 1.0);
}

LogicalResources logical_resources(int level) {
  if (level < 1 || level > 3)
    throw UnsupportedLevelError("logical_resources: level " + std::to_string(level) +
                                " not in {1, 2, 3}");
  const double scale = std::pow(64.0, level);
  LogicalResources r;
  r.level = level;
  r.physical_per_logical = std::pow(91.0, level);
  r.n_1qb = 28.0 * scale / 185.0;
  r.n_2qb = 64.0 * scale / 185.0;
  r.n_meas = 28.0 * scale / 185.0;
  return r;
}

GatePowerProfile gate_power_profile(const CryostatConfig& cfg, const QubitTech& tech,
                                    const StageProfile& stages) {
  cfg.validate();
  tech.validate();
  GatePowerProfile p;
  p.tau_step = tech.tau_step;
  p.p_pi = constants::hbar * tech.angular_frequency() * std::numbers::pi * std::numbers::pi /
           (4.0 * tech.decay_rate() * tech.tau_1qb * tech.tau_1qb);

  // Carnot-weighted heat of the drive power dissipated at each stage.
  double lift = 0.0;
  double below = 0.0;
  for (Eigen::Index i = 0; i < stages.size(); ++i) {
    const double t = stages.temperature(i);
    lift += (cfg.t_gen - t) / t * (stages.cumulative(i) - below);
    below = stages.cumulative(i);
  }
  p.p_2qb = p.p_pi * lift;
  p.p_1qb = tech.tau_1qb / tech.tau_step * p.p_2qb;
  p.p_meas = tech.tau_meas / tech.tau_step * p.p_2qb;

  const double t_ext = cfg.t_gen;
  p.p_qubit = t_ext / cfg.t_gen * cfg.heat_gen + t_ext / cfg.t_hemt * cfg.heat_hemt +
              t_ext / cfg.t_para * cfg.heat_para;
  return p;
}

double success_probability(double q_logical, double d_logical, int level, double eps_err,
                           double eps_thr) {
  if (!(eps_thr > 0.0)) throw DomainError("success_probability: eps_thr must be > 0");
  if (!(q_logical > 0.0) || !(d_logical > 0.0))
    throw DomainError("success_probability: circuit size must be > 0");
  if (level < 1) throw UnsupportedLevelError("success_probability: level must be >= 1");
  const double suppression = std::pow(eps_err / eps_thr, std::pow(2.0, level));
  return std::clamp(1.0 - q_logical * d_logical * eps_thr * suppression, 0.0, 1.0);
}

DeviceModel make_device_model(const CryostatConfig& cfg, const QubitTech& tech) {
  DeviceModel m;
  m.stages = cryostat_stages(cfg);
  m.error_rate = physical_error_rate(cfg, tech);
  m.powers = gate_power_profile(cfg, tech, m.stages);
  return m;
}

}  // namespace meqc
