// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "fdtrx/fixed_point.hpp"
#include "fdtrx/system_params.hpp"

namespace fdtrx {

enum class SolveStatus {
  Solved,
  InfeasibleDiverged,  // interference fixed point blew past the divergence cap
  InfeasibleMaxIter,   // fixed point hit the iteration cap without converging
  InfeasibleNumeric,   // power system singular or produced nonpositive powers
};

const char* to_string(SolveStatus status);
inline bool solved(SolveStatus s) { return s == SolveStatus::Solved; }

// Minimum-power uplink receive design: powers from the interference fixed
// point p_l <- rho_l / (g_l^H M(p)^{-1} g_l) with
// M(p) = sum_j p_j C_j + noise * I, then beamformers v_l || M^{-1} g_l.
// C_j is the plain outer product g_j g_j^H, or its impaired variant with the
// delta2*beta2 diagonal when impaired is set. At the fixed point every
// uplink SINR equals its target. A final L x L tight-constraint solve
// polishes the powers to machine precision at the returned beamformers.
struct UlPowerControl {
  SolveStatus status = SolveStatus::InfeasibleNumeric;
  Eigen::VectorXd p;
  std::vector<Eigen::VectorXcd> v;
  int iterations = 0;
};
UlPowerControl solve_hd_ul(const std::vector<Eigen::VectorXcd>& g, const Eigen::VectorXd& gamma_u,
                           double noise, bool impaired, const SystemParams& params);

// Minimum-power downlink beamforming via its virtual-uplink dual: weights
// from the fixed point lambda_i <- rho_i / (h_i^H (sum_k lambda_k T_k + B)^{-1} h_i)
// with T_k = h_k h_k^H + beta1 * diag(|h_k|^2), directions from the same
// whitening matrix (phase-fixed so h_i^H wtilde_i is real positive), and
// powers from the K x K tight-constraint system against noise_vec.
// base (default identity) substitutes a different PD matrix B, which is how
// the alternating solver reuses this routine for cross-checks.
struct DlBeamforming {
  SolveStatus status = SolveStatus::InfeasibleNumeric;
  std::vector<Eigen::VectorXcd> w;       // sqrt(p) * wtilde
  std::vector<Eigen::VectorXcd> wtilde;  // unit directions
  Eigen::VectorXd p;
  Eigen::VectorXd lambda;  // virtual-uplink weights at the fixed point
  int iterations = 0;
};
DlBeamforming solve_hd_dl(const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXd& gamma_d,
                          const Eigen::VectorXd& noise_vec, const SystemParams& params,
                          const Eigen::MatrixXcd* base = nullptr);

}  // namespace fdtrx
