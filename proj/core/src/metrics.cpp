// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdtrx {
namespace {

Eigen::MatrixXcd sum_outer(const std::vector<Eigen::VectorXcd>& w, int n) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& wk : w) s.noalias() += wk * wk.adjoint();
  return s;
}

}  // namespace

double TransceiverSolution::dl_power() const {
  double s = 0.0;
  for (const auto& wk : w) s += wk.squaredNorm();
  return s;
}

double TransceiverSolution::ul_power() const { return p_u.sum(); }

double TransceiverSolution::total_power() const { return dl_power() + ul_power(); }

Eigen::MatrixXcd expected_sandwich(const Eigen::MatrixXcd& a, const SiCorrelation& corr) {
  const int n = corr.n_t;
  if (a.rows() != n || a.cols() != n) throw std::invalid_argument("expected_sandwich: size mismatch");
  if (corr.iid_variance)
    return (*corr.iid_variance * a.trace()) * Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.noalias() += a(i, j) * corr.r_phi0.block(i * n, j * n, n, n);
  return out;
}

Eigen::MatrixXcd expected_sandwich_rev(const Eigen::MatrixXcd& a, const SiCorrelation& corr) {
  const int n = corr.n_t;
  if (a.rows() != n || a.cols() != n)
    throw std::invalid_argument("expected_sandwich_rev: size mismatch");
  if (corr.iid_variance)
    return (*corr.iid_variance * a.trace()) * Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = (corr.r_phi0.block(j * n, i * n, n, n) * a).trace();
  return out;
}

Eigen::MatrixXcd impaired_outer(const Eigen::VectorXcd& x, double diag_factor) {
  Eigen::MatrixXcd m = x * x.adjoint();
  m.diagonal() += diag_factor * x.cwiseAbs2().cast<std::complex<double>>();
  return m;
}

double si_ul_noise_coeff(double variance, const SystemParams& params) {
  return (params.delta1 + params.delta2 * params.beta1 +
          params.delta2 * params.beta2 * (1.0 + params.beta1)) *
         variance;
}

Eigen::MatrixXcd si_rx_covariance(const std::vector<Eigen::VectorXcd>& w, const SiCorrelation& corr,
                                  const SystemParams& params) {
  const int n = corr.n_t;
  if (corr.iid_variance) {
    double dl = 0.0;
    for (const auto& wk : w) dl += wk.squaredNorm();
    return si_ul_noise_coeff(*corr.iid_variance, params) * dl * Eigen::MatrixXcd::Identity(n, n);
  }
  const Eigen::MatrixXcd ww = sum_outer(w, n);
  const Eigen::MatrixXcd ww_diag = ww.diagonal().asDiagonal();
  const Eigen::MatrixXcd s1 = expected_sandwich(ww, corr);
  const Eigen::MatrixXcd s2 = expected_sandwich(ww_diag, corr);
  Eigen::MatrixXcd out = params.delta1 * s1 + params.delta2 * params.beta1 * s2;
  out.diagonal() += params.delta2 * params.beta2 * (s1 + params.beta1 * s2).diagonal();
  return out;
}

Eigen::MatrixXcd si_tx_coupling(const Eigen::VectorXcd& v, const SiCorrelation& corr,
                                const SystemParams& params) {
  const int n = corr.n_t;
  if (corr.iid_variance) {
    const double c = (params.delta1 + params.delta2 * params.beta2 +
                      params.delta2 * params.beta1 * (1.0 + params.beta2)) *
                     *corr.iid_variance * v.squaredNorm();
    return c * Eigen::MatrixXcd::Identity(n, n);
  }
  Eigen::MatrixXcd out = params.delta1 * expected_sandwich_rev(v * v.adjoint(), corr);
  for (int b = 0; b < n; ++b) {
    const double vn2 = std::norm(v[b]);
    out.noalias() += (params.delta2 * params.beta2 * vn2) * corr.blocks_rbar[b];
    out(b, b) += params.delta2 * params.beta1 * (v.dot(corr.blocks_rtilde[b] * v)).real();
  }
  return out;
}

Eigen::MatrixXcd si_antenna_coupling(int n, const SiCorrelation& corr, const SystemParams& params) {
  if (n < 0 || n >= corr.n_t) throw std::out_of_range("si_antenna_coupling: antenna index");
  if (corr.iid_variance)
    return (*corr.iid_variance * (1.0 + params.beta1)) *
           Eigen::MatrixXcd::Identity(corr.n_t, corr.n_t);
  Eigen::MatrixXcd out = corr.blocks_rbar[n];
  for (int m = 0; m < corr.n_t; ++m)
    out(m, m) += params.beta1 * corr.blocks_r[m](n, n).real();
  return out;
}

double dl_sinr(int i, const TransceiverSolution& sol, const ChannelRealization& ch,
               const SystemParams& params) {
  const Eigen::VectorXcd& hi = ch.h[i];
  const double num = std::norm(hi.dot(sol.w[i]));
  double den = params.sigma_d_sq[i];
  for (int kk = 0; kk < static_cast<int>(sol.w.size()); ++kk) {
    if (kk != i) den += std::norm(hi.dot(sol.w[kk]));
    den += params.beta1 * (hi.cwiseAbs2().dot(sol.w[kk].cwiseAbs2()));
  }
  for (int j = 0; j < sol.p_u.size(); ++j) den += sol.p_u[j] * std::norm(ch.f(j, i));
  return num / den;
}

double ul_sinr(int l, const TransceiverSolution& sol, const ChannelRealization& ch,
               const SiCorrelation& corr, const SystemParams& params) {
  const Eigen::VectorXcd& vl = sol.v[l];
  const double num = sol.p_u[l] * std::norm(vl.dot(ch.g[l]));
  double den = params.sigma_z_tilde_sq();
  for (int j = 0; j < sol.p_u.size(); ++j) {
    if (j != l) den += sol.p_u[j] * std::norm(vl.dot(ch.g[j]));
    den += params.d2b2() * sol.p_u[j] * (vl.cwiseAbs2().dot(ch.g[j].cwiseAbs2()));
  }
  den += (vl.dot(si_rx_covariance(sol.w, corr, params) * vl)).real();
  return num / den;
}

Eigen::VectorXd adc_power(const TransceiverSolution& sol, const ChannelRealization& ch,
                          const SiCorrelation& corr, const SystemParams& params) {
  const int nt = params.n_t;
  Eigen::VectorXd out = Eigen::VectorXd::Constant(nt, params.sigma_z_sq);
  for (int j = 0; j < sol.p_u.size(); ++j) out += sol.p_u[j] * ch.g[j].cwiseAbs2();
  if (corr.iid_variance) {
    // White SI error: the coupling is (1+beta1)*variance*I for every antenna.
    double dl = 0.0;
    for (const auto& wk : sol.w) dl += wk.squaredNorm();
    out.array() += *corr.iid_variance * (1.0 + params.beta1) * dl;
    return out;
  }
  for (int n = 0; n < nt; ++n) {
    const Eigen::MatrixXcd ups = si_antenna_coupling(n, corr, params);
    for (const auto& wk : sol.w) out[n] += (wk.dot(ups * wk)).real();
  }
  return out;
}

FeasibilityReport check_feasible(const TransceiverSolution& sol, const ChannelRealization& ch,
                                 const SiCorrelation& corr, const SystemParams& params,
                                 double tol) {
  FeasibilityReport rep;
  rep.dl_slack.resize(params.k);
  rep.ul_slack.resize(params.l);
  rep.adc_slack.resize(params.n_t);

  for (int i = 0; i < params.k; ++i)
    rep.dl_slack[i] = (dl_sinr(i, sol, ch, params) - params.gamma_d[i]) / params.gamma_d[i];
  for (int j = 0; j < params.l; ++j)
    rep.ul_slack[j] = (ul_sinr(j, sol, ch, corr, params) - params.gamma_u[j]) / params.gamma_u[j];
  if (params.gamma_adc) {
    const Eigen::VectorXd adc = adc_power(sol, ch, corr, params);
    for (int n = 0; n < params.n_t; ++n)
      rep.adc_slack[n] = (*params.gamma_adc - adc[n]) / *params.gamma_adc;
  } else {
    rep.adc_slack.setConstant(std::numeric_limits<double>::infinity());
  }

  rep.unit_norm_ok = true;
  for (const auto& vl : sol.v)
    if (std::abs(vl.norm() - 1.0) > 1e-9) rep.unit_norm_ok = false;

  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rep.dl_slack.size(); ++i) worst = std::min(worst, rep.dl_slack[i]);
  for (int j = 0; j < rep.ul_slack.size(); ++j) worst = std::min(worst, rep.ul_slack[j]);
  if (params.gamma_adc)
    for (int n = 0; n < rep.adc_slack.size(); ++n) worst = std::min(worst, rep.adc_slack[n]);
  rep.worst = worst;
  rep.feasible = rep.unit_norm_ok && worst >= -tol;
  return rep;
}

}  // namespace fdtrx
