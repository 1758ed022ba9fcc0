// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/bisection.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace fdtrx {

SiPowerCoefficients si_power_coefficients(const SiCorrelation& corr, const SystemParams& params,
                                          bool worst_case_bound) {
  SiPowerCoefficients c;
  if (corr.iid_variance) {
    c.error_variance = *corr.iid_variance;
  } else if (worst_case_bound) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(corr.r_phi0);
    c.error_variance = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  } else {
    throw std::invalid_argument(
        "si_power_coefficients: correlation is not white; request the worst-case bound explicitly");
  }
  c.ul_noise_coeff = si_ul_noise_coeff(c.error_variance, params);
  c.adc_coeff = c.error_variance * (1.0 + params.beta1);
  return c;
}

FixedDlPowerSolution solve_fixed_dl_power(double eta, const ChannelRealization& ch,
                                          const SiCorrelation& corr, const SystemParams& params,
                                          const SiPowerCoefficients& coeffs) {
  FixedDlPowerSolution out;
  out.eta = eta;

  const double ul_noise = coeffs.ul_noise_coeff * eta + params.sigma_z_tilde_sq();
  const UlPowerControl ul = solve_hd_ul(ch.g, params.gamma_u, ul_noise, /*impaired=*/true, params);
  out.iterations = ul.iterations;
  out.feasible_stage1 = solved(ul.status);
  if (!out.feasible_stage1) return out;
  out.p_u = ul.p;
  out.v = ul.v;

  Eigen::VectorXd dl_noise = params.sigma_d_sq;
  for (int i = 0; i < params.k; ++i)
    for (int j = 0; j < params.l; ++j) dl_noise[i] += out.p_u[j] * std::norm(ch.f(j, i));

  const DlBeamforming dl = solve_hd_dl(ch.h, params.gamma_d, dl_noise, params);
  out.iterations += dl.iterations;
  if (!solved(dl.status)) return out;
  out.w = dl.w;
  out.dl_power = 0.0;
  for (const auto& wk : dl.w) out.dl_power += wk.squaredNorm();

  if (params.gamma_adc) {
    // Explicit white-error form of the per-antenna cap.
    for (int n = 0; n < params.n_t; ++n) {
      double ul_term = params.sigma_z_sq;
      for (int j = 0; j < params.l; ++j) ul_term += out.p_u[j] * std::norm(ch.g[j][n]);
      if (coeffs.adc_coeff * out.dl_power + ul_term > *params.gamma_adc) return out;
    }
  }
  out.feasible_stage2 = true;
  return out;
}

BisectionResult solve_bisection(const ChannelRealization& ch, const SiCorrelation& corr,
                                const SystemParams& params, bool worst_case_bound) {
  const SiPowerCoefficients coeffs = si_power_coefficients(corr, params, worst_case_bound);

  BisectionResult out;
  double lower = 0.0;
  double upper = params.p_max;
  std::optional<FixedDlPowerSolution> affordable;

  while (upper - lower > params.tol_bisect) {
    const double mid = 0.5 * (lower + upper);
    FixedDlPowerSolution s = solve_fixed_dl_power(mid, ch, corr, params, coeffs);
    ++out.iterations;
    if (!s.feasible() || s.dl_power <= mid) {
      if (s.feasible() && s.dl_power <= mid) affordable = std::move(s);
      upper = mid;
    } else {
      lower = mid;
    }
  }

  if (std::abs(upper - params.p_max) <= params.tol_bisect || !affordable) {
    out.status = SolveStatus::InfeasibleDiverged;
    return out;
  }

  out.status = SolveStatus::Solved;
  out.eta_star = affordable->eta;
  out.sol.w = affordable->w;
  out.sol.v = affordable->v;
  out.sol.p_u = affordable->p_u;
  out.total_power = out.sol.total_power();
  return out;
}

}  // namespace fdtrx
