// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdtrx/channel.hpp"
#include "fdtrx/hd_solvers.hpp"
#include "fdtrx/metrics.hpp"
#include "fdtrx/si_correlation.hpp"
#include "fdtrx/system_params.hpp"

namespace fdtrx {

// ADC dual variables and the penalty aggregates they induce on the weighted
// design problem: b_matrix = I + sum_n nu_n * antenna coupling(n) weights the
// DL power, b_coeffs[l] = 1 + sum_n nu_n |g_l[n]|^2 weights UL power l.
struct DualState {
  Eigen::VectorXd nu;         // length n_t, nonnegative
  Eigen::MatrixXcd b_matrix;  // PD, >= I in the Loewner order
  Eigen::VectorXd b_coeffs;   // length l, entries >= 1
  Eigen::VectorXd lambda;     // filled by the dual fixed point
  Eigen::VectorXd mu;
};
DualState make_dual_state(const Eigen::VectorXd& nu, const ChannelRealization& ch,
                          const SiCorrelation& corr, const SystemParams& params);

// Receive beamformers nulling all other uplink users; falls back to matched
// filters (reported through used_fallback) when the uplink channel matrix is
// rank-deficient, including l > n_t.
std::vector<Eigen::VectorXcd> zero_forcing_init(const std::vector<Eigen::VectorXcd>& g,
                                                bool* used_fallback = nullptr);

// Max-SINR receive beamformers against the full interference covariance of
// the current design: v_l || (sum_j p_j C_j + rx SI covariance + noise)^{-1} g_l.
std::vector<Eigen::VectorXcd> mmse_receive(const std::vector<Eigen::VectorXcd>& w,
                                           const Eigen::VectorXd& p_u,
                                           const ChannelRealization& ch, const SiCorrelation& corr,
                                           const SystemParams& params);

// One application of the joint virtual-dual update at fixed receive
// beamformers: stacked state [lambda; mu] -> [lambda'; mu']. Positivity,
// monotonicity, and scalability hold, so Picard iteration from zero converges
// to the unique fixed point whenever one exists.
class DualityMap {
 public:
  DualityMap(const std::vector<Eigen::VectorXcd>& v, const ChannelRealization& ch,
             const SiCorrelation& corr, const SystemParams& params, const DualState& dual);

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

  // Whitening matrix at the given state; DL directions come from its inverse.
  Eigen::MatrixXcd q_matrix(const Eigen::VectorXd& x) const;

  int n_dl() const { return kk_; }
  int n_ul() const { return ll_; }

 private:
  int kk_ = 0;
  int ll_ = 0;
  Eigen::VectorXd rho_d_, rho_u_;
  std::vector<Eigen::VectorXcd> h_;
  std::vector<Eigen::MatrixXcd> h_coupling_;   // per DL user
  std::vector<Eigen::MatrixXcd> v_coupling_;   // per UL user (transmit-side SI view)
  Eigen::MatrixXcd b_matrix_;
  Eigen::VectorXd b_coeffs_;
  Eigen::MatrixXd g_quad_;   // (l, j): v_l^H C_j v_l
  Eigen::MatrixXd f_sq_;     // (l, k): |f(l, k)|^2
  Eigen::VectorXd vg_sq_;    // |v_l^H g_l|^2
};

// Signals an inconsistent dual state: the tight-constraint power system was
// singular or produced nonpositive powers.
class SolverInconsistency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tight-constraint power allocation at fixed directions: solves the
// (k+l) x (k+l) system that makes every SINR exactly equal to its target.
struct PowerAllocation {
  Eigen::VectorXd p_d;
  Eigen::VectorXd p_u;
};
PowerAllocation allocate_powers(const std::vector<Eigen::VectorXcd>& wtilde,
                                const std::vector<Eigen::VectorXcd>& v,
                                const ChannelRealization& ch, const SiCorrelation& corr,
                                const SystemParams& params, const DualState& dual);

// Weighted QoS design at fixed receive beamformers and fixed ADC duals: dual
// fixed point from zero, DL directions from the whitening inverse, powers
// from the tight-constraint system.
struct WeightedQosSolution {
  SolveStatus status = SolveStatus::InfeasibleNumeric;
  std::vector<Eigen::VectorXcd> w;
  std::vector<Eigen::VectorXcd> wtilde;
  Eigen::VectorXd p_d;
  Eigen::VectorXd p_u;
  Eigen::VectorXd lambda;
  Eigen::VectorXd mu;
  int iterations = 0;
  double total_power() const { return p_d.sum() + p_u.sum(); }
};
WeightedQosSolution solve_weighted_qos(const std::vector<Eigen::VectorXcd>& v,
                                       const DualState& dual, const ChannelRealization& ch,
                                       const SiCorrelation& corr, const SystemParams& params);

// Minimum-power design at fixed receive beamformers including the ADC cap:
// without a cap this is a single weighted solve at zero duals; with one, a
// projected subgradient on the ADC duals (unit step, per the reference
// configuration) re-solves the weighted problem each round and keeps the
// cheapest iterate whose worst ADC violation is within 1e-4 relative.
struct InnerSolution {
  SolveStatus status = SolveStatus::InfeasibleNumeric;
  std::vector<Eigen::VectorXcd> w;
  Eigen::VectorXd p_u;
  Eigen::VectorXd p_d;
  Eigen::VectorXd nu;
  int subgradient_rounds = 0;
  bool adc_active = false;
  std::string note;
  double total_power() const { return p_d.sum() + p_u.sum(); }
};
InnerSolution solve_qos_fixed_receive(const std::vector<Eigen::VectorXcd>& v,
                                      const ChannelRealization& ch, const SiCorrelation& corr,
                                      const SystemParams& params);

// Alternating solver for the joint QoS problem: zero-forcing receive init,
// then alternate (inner solve at fixed v) with (max-SINR receive update).
// The objective never increases; the iterate kept pairs each inner solve
// with the exact receive beamformers it was solved against, so constraints
// are tight at the returned point.
struct AlternatingTrace {
  std::vector<double> objective;  // accepted objective values, one per outer iteration
  bool zf_fallback = false;
  bool stalled = false;  // a later inner solve failed; last good iterate returned
  std::string note;
};
struct AlternatingResult {
  SolveStatus status = SolveStatus::InfeasibleNumeric;
  TransceiverSolution sol;
  AlternatingTrace trace;
  int iterations = 0;
  double total_power = 0.0;
  Eigen::VectorXd nu;
};
AlternatingResult solve_alternating(const ChannelRealization& ch, const SiCorrelation& corr,
                                    const SystemParams& params);

}  // namespace fdtrx
