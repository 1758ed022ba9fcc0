// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "fdtrx/channel.hpp"
#include "fdtrx/metrics.hpp"
#include "fdtrx/rng.hpp"
#include "fdtrx/si_correlation.hpp"
#include "fdtrx/system_params.hpp"

namespace fdtrx::test {

inline double rel_err(double a, double b) {
  double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double mat_rel_err(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline Eigen::VectorXcd random_cvec(int n, double variance, rng::Stream& s) {
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = s.cgauss(variance);
  return x;
}

inline Eigen::VectorXcd random_unit(int n, rng::Stream& s) {
  Eigen::VectorXcd x = random_cvec(n, 1.0, s);
  return x / x.norm();
}

// Random Hermitian PSD error covariance with mean per-entry variance about
// `scale`, full rank. Never an exact scalar matrix, so no fast path triggers.
inline SiCorrelation random_correlation(int n_t, double scale, double beta2, rng::Stream& s) {
  int n = n_t * n_t;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = s.cgauss(1.0);
  Eigen::MatrixXcd r = a * a.adjoint();
  r *= scale * n / r.trace().real();
  return extract_blocks(r, beta2);
}

// Unit-scale instance: O(1) noise floors and channel gains so that power
// grids and subgradient steps live at a sane scale.
inline SystemParams unit_params(int n_t, int k, int l, double gamma_lin) {
  SystemParams p;
  p.n_t = n_t;
  p.k = k;
  p.l = l;
  p.sigma_z_sq = 1.0;
  p.sigma_d_sq = Eigen::VectorXd::Constant(k, 1.0);
  p.pathloss_bs_mu_db = 0.0;
  p.pathloss_umu_dmu_db = -3.0;
  p.pathloss_si_db = 0.0;
  p.train_energy = 10.0;
  p.p_max = 1e6;
  p.set_uniform_targets(gamma_lin);
  p.finalize_divergence_cap();
  return p;
}

inline TransceiverSolution make_solution(std::vector<Eigen::VectorXcd> w,
                                         std::vector<Eigen::VectorXcd> v, Eigen::VectorXd p_u) {
  TransceiverSolution sol;
  sol.w = std::move(w);
  sol.v = std::move(v);
  sol.p_u = std::move(p_u);
  return sol;
}

// ---- Monte-Carlo estimators over draws of the residual SI matrix. These are
// the sampling oracles the closed-form expectations are tested against; they
// are built from per-draw arithmetic only, never from the functions under
// test.

inline Eigen::MatrixXcd mc_sandwich(const Eigen::MatrixXcd& a, const SiCorrelation& corr,
                                    int draws, uint64_t seed) {
  SiSampler sampler(corr.r_phi0, corr.n_t);
  rng::Stream s(seed);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(corr.n_t, corr.n_t);
  for (int d = 0; d < draws; ++d) {
    Eigen::MatrixXcd phi = sampler.draw(s);
    acc += phi * a * phi.adjoint();
  }
  return acc / double(draws);
}

inline Eigen::MatrixXcd mc_sandwich_rev(const Eigen::MatrixXcd& a, const SiCorrelation& corr,
                                        int draws, uint64_t seed) {
  SiSampler sampler(corr.r_phi0, corr.n_t);
  rng::Stream s(seed);
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(corr.n_t, corr.n_t);
  for (int d = 0; d < draws; ++d) {
    Eigen::MatrixXcd phi = sampler.draw(s);
    acc += phi.adjoint() * a * phi;
  }
  return acc / double(draws);
}

// Per-draw transmit-side SI coupling at receive beamformer v.
inline Eigen::MatrixXcd mc_tx_coupling(const Eigen::VectorXcd& v, const SiCorrelation& corr,
                                       const SystemParams& params, int draws, uint64_t seed) {
  SiSampler sampler(corr.r_phi0, corr.n_t);
  rng::Stream s(seed);
  int n = corr.n_t;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  double d2b2 = params.delta2 * params.beta2;
  double d2b1 = params.delta2 * params.beta1;
  for (int d = 0; d < draws; ++d) {
    Eigen::MatrixXcd phi = sampler.draw(s);
    Eigen::VectorXcd pv = phi.adjoint() * v;
    acc += params.delta1 * (pv * pv.adjoint());
    for (int b = 0; b < n; ++b) {
      Eigen::RowVectorXcd row = phi.row(b);
      acc += (d2b2 * std::norm(v[b])) * (row.adjoint() * row);
      double quad = std::norm(v.dot(phi.col(b)));
      double diag_part = params.beta2 * v.cwiseAbs2().dot(phi.col(b).cwiseAbs2());
      acc(b, b) += d2b1 * (quad + diag_part);
    }
  }
  return acc / double(draws);
}

// Per-draw coupling of DL beamformers into the ADC input behind antenna n.
inline Eigen::MatrixXcd mc_antenna_coupling(int n, const SiCorrelation& corr,
                                            const SystemParams& params, int draws, uint64_t seed) {
  SiSampler sampler(corr.r_phi0, corr.n_t);
  rng::Stream s(seed);
  int nt = corr.n_t;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(nt, nt);
  for (int d = 0; d < draws; ++d) {
    Eigen::MatrixXcd phi = sampler.draw(s);
    Eigen::RowVectorXcd row = phi.row(n);
    acc += row.adjoint() * row;
    for (int m = 0; m < nt; ++m) acc(m, m) += params.beta1 * std::norm(phi(n, m));
  }
  return acc / double(draws);
}

// Per-draw ADC input powers for a full candidate design.
inline Eigen::VectorXd mc_adc_power(const TransceiverSolution& sol, const ChannelRealization& ch,
                                    const SiCorrelation& corr, const SystemParams& params,
                                    int draws, uint64_t seed) {
  SiSampler sampler(corr.r_phi0, corr.n_t);
  rng::Stream s(seed);
  int nt = corr.n_t;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(nt);
  for (int d = 0; d < draws; ++d) {
    Eigen::MatrixXcd phi = sampler.draw(s);
    for (const auto& w : sol.w) {
      Eigen::VectorXcd pw = phi * w;
      acc += pw.cwiseAbs2();
      acc += params.beta1 * (phi.cwiseAbs2() * w.cwiseAbs2());
    }
  }
  acc /= double(draws);
  acc.array() += params.sigma_z_sq;
  for (int j = 0; j < params.l; ++j) acc += sol.p_u[j] * ch.g[j].cwiseAbs2();
  return acc;
}

}  // namespace fdtrx::test
