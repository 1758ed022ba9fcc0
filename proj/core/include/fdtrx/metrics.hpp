// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "fdtrx/channel.hpp"
#include "fdtrx/si_correlation.hpp"
#include "fdtrx/system_params.hpp"

namespace fdtrx {

// A full candidate design: downlink beamformers (transmit power included in
// their norm), unit-norm uplink receive beamformers, and uplink powers.
struct TransceiverSolution {
  std::vector<Eigen::VectorXcd> w;  // k vectors
  std::vector<Eigen::VectorXcd> v;  // l unit-norm vectors
  Eigen::VectorXd p_u;              // length l, nonnegative

  double dl_power() const;
  double ul_power() const;
  double total_power() const;
};

// Per-constraint relative slacks: (achieved - target)/target for SINRs,
// (cap - power)/cap for the ADC cap (+inf sentinel when the cap is off).
struct FeasibilityReport {
  Eigen::VectorXd dl_slack;
  Eigen::VectorXd ul_slack;
  Eigen::VectorXd adc_slack;
  bool unit_norm_ok = true;
  bool feasible = false;
  double worst = 0.0;
};

// E[P a P^H] for a random matrix P whose vec has covariance corr.r_phi0.
Eigen::MatrixXcd expected_sandwich(const Eigen::MatrixXcd& a, const SiCorrelation& corr);

// E[P^H a P], the transposed-index analogue.
Eigen::MatrixXcd expected_sandwich_rev(const Eigen::MatrixXcd& a, const SiCorrelation& corr);

// x x^H + diag_factor * diag(|x|^2): the rank-one user coupling matrix with
// its impairment diagonal. Both link directions use this shape.
Eigen::MatrixXcd impaired_outer(const Eigen::VectorXcd& x, double diag_factor);

// Scalar multiplying total DL transmit power in the uplink noise floor when
// the SI error is white with the given per-tap variance.
double si_ul_noise_coeff(double variance, const SystemParams& params);

// Receiver-side residual-SI covariance seen by the uplink, as a function of
// the DL beamformers. Defined WITHOUT the receiver-noise diagonal, which is
// accounted once through sigma_z_tilde_sq; this keeps the identity
// v^H cov v == sum_k w_k^H coupling(v) w_k exact.
Eigen::MatrixXcd si_rx_covariance(const std::vector<Eigen::VectorXcd>& w, const SiCorrelation& corr,
                                  const SystemParams& params);

// Transmit-side view of the same statistic: quadratic form in each DL
// beamformer at fixed receive beamformer v (the adjoint of si_rx_covariance).
Eigen::MatrixXcd si_tx_coupling(const Eigen::VectorXcd& v, const SiCorrelation& corr,
                                const SystemParams& params);

// Residual-SI contribution of the DL beamformers to the input power of the
// ADC behind antenna n (0-based).
Eigen::MatrixXcd si_antenna_coupling(int n, const SiCorrelation& corr, const SystemParams& params);

double dl_sinr(int i, const TransceiverSolution& sol, const ChannelRealization& ch,
               const SystemParams& params);

double ul_sinr(int l, const TransceiverSolution& sol, const ChannelRealization& ch,
               const SiCorrelation& corr, const SystemParams& params);

// Per-antenna ADC input power: residual SI + uplink signals + receiver noise.
Eigen::VectorXd adc_power(const TransceiverSolution& sol, const ChannelRealization& ch,
                          const SiCorrelation& corr, const SystemParams& params);

FeasibilityReport check_feasible(const TransceiverSolution& sol, const ChannelRealization& ch,
                                 const SiCorrelation& corr, const SystemParams& params,
                                 double tol = 1e-6);

}  // namespace fdtrx
