// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <optional>

namespace fdtrx {

// dB <-> linear conversions. Powers and variances use the /10 rule; amplitude
// (field) factors use /20.
double db_to_linear(double db);
double linear_to_db(double lin);
double db20_to_amplitude(double db);

// Static description of one full-duplex base-station instance: array size,
// user counts, per-user SINR targets, noise and hardware-impairment levels,
// the self-interference channel model constants, and solver knobs.
//
// All powers and variances are linear milliwatts; configuration files carry
// dB/dBm and are converted on load.
struct SystemParams {
  int n_t = 10;  // base-station antennas
  int k = 4;     // downlink users
  int l = 4;     // uplink users

  Eigen::VectorXd gamma_d;           // length k, linear SINR targets
  Eigen::VectorXd gamma_u;           // length l, linear SINR targets
  std::optional<double> gamma_adc;   // per-antenna ADC input-power cap, mW
  Eigen::VectorXd sigma_d_sq;        // length k, downlink noise powers, mW
  double sigma_z_sq = 3.1622776601683794e-9;  // BS receive noise, mW (-85 dBm)

  double beta1 = 1e-3;   // transmitter impairment factor
  double beta2 = 1e-3;   // receiver impairment factor
  double delta1 = 1e-5;  // linear digital-cancellation residual
  double delta2 = 1e-2;  // nonlinear digital-cancellation residual

  double pathloss_bs_mu_db = -80.0;
  double pathloss_umu_dmu_db = -83.0;
  double pathloss_si_db = -10.0;
  double crosstalk_base_db = -24.0;  // adjacent-antenna tap attenuation
  double crosstalk_step_db = -6.0;   // extra attenuation per antenna of separation
  double antenna_corr = 0.9;         // geometric receive-correlation decay, in (0,1]
  double train_energy = 1e-2;        // pilot energy of the analog-cancellation stage

  double p_max = 1e4;  // bisection budget, mW (40 dBm)

  double tol_bisect = 1e-3;
  double tol_fp = 1e-11;    // relative fixed-point tolerance
  double tol_ao = 1e-6;     // relative objective-improvement tolerance
  double tol_subgrad = 1e-3;
  int max_iter_fp = 50000;
  int max_iter_ao = 100;
  int max_iter_subgrad = 300;
  double divergence_cap = 3.1622776601683795e3;  // 1e12 x largest default noise power

  double rho_d(int i) const { return gamma_d[i] / (1.0 + gamma_d[i]); }
  double rho_u(int j) const { return gamma_u[j] / (1.0 + gamma_u[j]); }
  double d2b2() const { return delta2 * beta2; }
  double sigma_z_tilde_sq() const { return (1.0 + delta2 * beta2) * sigma_z_sq; }
  double min_noise() const;
  double max_noise() const;

  // Same target for every user on both links.
  void set_uniform_targets(double gamma_lin);

  // divergence_cap = 1e12 x the largest configured noise power.
  void finalize_divergence_cap();

  // Throws std::invalid_argument on any malformed field, including
  // gamma_u * delta2 * beta2 >= 1 (such an uplink target is unreachable
  // regardless of power, so it is rejected up front).
  void validate() const;

  // Stock instance: default constants, uniform targets at gamma_db.
  static SystemParams reference(int n_t, int k, int l, double gamma_db);
};

}  // namespace fdtrx
