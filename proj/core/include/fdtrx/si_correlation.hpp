// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "fdtrx/rng.hpp"
#include "fdtrx/system_params.hpp"

namespace fdtrx {

// Second-order statistics of the residual self-interference channel left
// after the analog cancellation stage, together with the per-antenna block
// views the metrics need. Layout follows the column-stacking vec convention
// project-wide: vec index j*n_t + i addresses matrix entry (i, j).
struct SiCorrelation {
  int n_t = 0;
  Eigen::MatrixXcd r_phi0;                      // n_t^2 x n_t^2 Hermitian PSD
  std::vector<Eigen::MatrixXcd> blocks_r;       // covariance of column n
  std::vector<Eigen::MatrixXcd> blocks_rbar;    // covariance of row n (conjugated ordering)
  std::vector<Eigen::MatrixXcd> blocks_rtilde;  // blocks_r + beta2 * diag(blocks_r)
  std::optional<double> iid_variance;           // set iff r_phi0 == sigma^2 * I exactly
};

// Covariance of the raw self-interference channel before estimation:
// per-tap amplitude from the antenna crosstalk profile (Toeplitz in antenna
// separation: 0 dB on the diagonal, crosstalk_base_db one antenna away, an
// extra crosstalk_step_db per further antenna) and a geometric receive
// correlation antenna_corr^|distance|. Real symmetric PSD of size n_t^2.
Eigen::MatrixXd build_si_correlation(const SystemParams& params);

// Estimation-error covariance of a pilot-aided LMMSE stage run against r_h0:
// r_phi0 = r_h0 - r_h0 (r_h0 + (sigma_z_sq/train_energy) I)^{-1} r_h0,
// with block views populated and the exact scalar-matrix case detected.
SiCorrelation lmmse_error_correlation(const Eigen::MatrixXcd& r_h0, const SystemParams& params);

// Populate the block views of an existing error covariance.
SiCorrelation extract_blocks(const Eigen::MatrixXcd& r_phi0, double beta2);

// Exact scalar covariance: r_phi0 = variance * I.
SiCorrelation iid_si_correlation(double variance, int n_t, double beta2);

// Draws of a random matrix whose vec has covariance r_phi0. Factorization is
// eigen-based with negative eigenvalues clipped at zero, so rank-deficient
// covariances are fine. This is the sampling oracle used by tests.
class SiSampler {
 public:
  SiSampler(const Eigen::MatrixXcd& r_phi0, int n_t);
  Eigen::MatrixXcd draw(rng::Stream& stream) const;

 private:
  int n_t_;
  Eigen::MatrixXcd factor_;  // r_phi0 = factor * factor^H
};

}  // namespace fdtrx
