// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "fdtrx/channel.hpp"
#include "fdtrx/hd_solvers.hpp"
#include "fdtrx/metrics.hpp"
#include "fdtrx/si_correlation.hpp"
#include "fdtrx/system_params.hpp"

namespace fdtrx {

// Scalar couplings through which total DL transmit power enters the uplink
// when the residual SI statistics are white (or are bounded by a white
// worst case): error_variance is the per-tap variance (or the spectral bound
// lambda_max(r_phi0)), ul_noise_coeff multiplies DL power in the uplink noise
// floor, adc_coeff multiplies DL power in every ADC input power.
struct SiPowerCoefficients {
  double error_variance = 0.0;
  double ul_noise_coeff = 0.0;
  double adc_coeff = 0.0;
};

// Throws std::invalid_argument when the correlation is not white and the
// worst-case bound was not explicitly requested.
SiPowerCoefficients si_power_coefficients(const SiCorrelation& corr, const SystemParams& params,
                                          bool worst_case_bound = false);

// Joint design with the total DL transmit power replaced by the proxy eta:
// stage 1 solves the uplink (impaired couplings, noise ul_noise_coeff*eta +
// sigma_z_tilde_sq), stage 2 solves the downlink against the stage-1
// cross-interference and then checks the ADC caps in their explicit
// white-error form. Infeasibility is encoded in the flags, not thrown.
struct FixedDlPowerSolution {
  double eta = 0.0;
  bool feasible_stage1 = false;
  bool feasible_stage2 = false;
  Eigen::VectorXd p_u;
  std::vector<Eigen::VectorXcd> v;
  std::vector<Eigen::VectorXcd> w;
  double dl_power = 0.0;
  int iterations = 0;
  bool feasible() const { return feasible_stage1 && feasible_stage2; }
};
FixedDlPowerSolution solve_fixed_dl_power(double eta, const ChannelRealization& ch,
                                          const SiCorrelation& corr, const SystemParams& params,
                                          const SiPowerCoefficients& coeffs);

// Globally optimal joint design under white (or worst-case-bounded) SI error:
// bisection on eta over [0, p_max]. A midpoint moves the upper bound when the
// proxy problem is infeasible there or already affordable (dl_power <= eta);
// the returned solution is the last affordable solve, which sits within
// tol_bisect of the crossing dl_power(eta) = eta. Declared infeasible when
// the upper bound never left p_max or no affordable solve was ever recorded.
struct BisectionResult {
  SolveStatus status = SolveStatus::InfeasibleNumeric;
  TransceiverSolution sol;
  double eta_star = 0.0;
  int iterations = 0;
  double total_power = 0.0;
};
BisectionResult solve_bisection(const ChannelRealization& ch, const SiCorrelation& corr,
                                const SystemParams& params, bool worst_case_bound = false);

}  // namespace fdtrx
