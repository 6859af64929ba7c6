#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "meqc/errors.hpp"

namespace meqc {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double boltzmann = 1.380649e-23;    // J / K
}  // namespace constants

// Dilution-refrigerator wiring: K stages between the qubit and the signal
// generator, with equal-ratio attenuators on the drive line.
struct CryostatConfig {
  double total_attenuation_db = 40.0;
  int num_stages = 5;
  double t_qubit = 0.1;      // K
  double t_gen = 300.0;      // K
  double heat_gen = 10e-6;   // W, signal generation and readout
  double heat_hemt = 50e-6;  // W at t_hemt
  double t_hemt = 70.0;      // K
  double heat_para = 10e-9;  // W at t_para
  double t_para = 4.0;       // K

  void validate() const;
};

struct QubitTech {
  double frequency = 6e9;          // Hz
  double decoherence_time = 1e-3;  // s, inverse of the spontaneous emission rate
  double tau_1qb = 25e-9;          // s
  double tau_2qb = 100e-9;         // s
  double tau_meas = 100e-9;        // s
  double tau_step = 100e-9;        // s

  double angular_frequency() const { return 2.0 * std::numbers::pi * frequency; }
  double decay_rate() const { return 1.0 / decoherence_time; }
  void validate() const;
};

// Per-stage temperatures (index 0 is the qubit stage), per-attenuator linear
// ratio, and cumulative attenuation below each stage.
struct StageProfile {
  Eigen::VectorXd temperature;
  double attenuator_ratio = 1.0;
  // cumulative(i) = A^(i / (K - 1)); cumulative(0) = 1, cumulative(K-1) = A.
  Eigen::VectorXd cumulative;

  Eigen::Index size() const { return temperature.size(); }
};

// Per-logical-qubit physical overhead for a concatenated code at level k.
struct LogicalResources {
  int level = 1;
  double physical_per_logical = 91.0;
  double n_1qb = 0.0;   // physical 1qb gates per time step
  double n_2qb = 0.0;   // physical 2qb gates per time step
  double n_meas = 0.0;  // physical measurements per time step
};

struct GatePowerProfile {
  double p_pi = 0.0;     // W
  double p_1qb = 0.0;    // W
  double p_2qb = 0.0;    // W
  double p_meas = 0.0;   // W
  double p_qubit = 0.0;  // W
  double tau_step = 100e-9;

  // Energies per gate over one time step.
  double e_1qb() const { return p_1qb * tau_step; }
  double e_2qb() const { return p_2qb * tau_step; }
  double e_meas() const { return p_meas * tau_step; }
  double e_qubit() const { return p_qubit * tau_step; }
};

StageProfile cryostat_stages(const CryostatConfig& cfg);

/// Mean thermal photon number at frequency `frequency` (Hz, converted to
/// angular) and temperature `temperature` (K).
template <typename Scalar>
Scalar bose_einstein(Scalar temperature, Scalar frequency) {
  if (!(temperature > Scalar(0))) throw DomainError("bose_einstein: temperature must be > 0");
  if (!(frequency > Scalar(0))) throw DomainError("bose_einstein: frequency must be > 0");
  using std::expm1;
  const Scalar omega = Scalar(2) * std::numbers::pi_v<Scalar> * frequency;
  const Scalar x = Scalar(constants::hbar) * omega / (Scalar(constants::boltzmann) * temperature);
  if (x > Scalar(700)) return Scalar(0);
  return Scalar(1) / expm1(x);
}

double physical_error_rate(const CryostatConfig& cfg, const QubitTech& tech);

LogicalResources logical_resources(int level);

GatePowerProfile gate_power_profile(const CryostatConfig& cfg, const QubitTech& tech,
                                    const StageProfile& stages);

/// Linearized probability that a logical circuit with q_logical x d_logical
/// error locations completes without a logical fault.
double success_probability(double q_logical, double d_logical, int level, double eps_err,
                           double eps_thr);

// Everything the quantum cost terms need, evaluated once per device config.
struct DeviceModel {
  StageProfile stages;
  double error_rate = 0.0;
  GatePowerProfile powers;
};

DeviceModel make_device_model(const CryostatConfig& cfg, const QubitTech& tech);

}  // namespace meqc
