// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/si_correlation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace fdtrx {
namespace {

// Exact test for r == c*I; returns c when it holds.
std::optional<double> scalar_identity_factor(const Eigen::MatrixXcd& r) {
  const double c = r(0, 0).real();
  const Eigen::Index n = r.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::complex<double> want = (i == j) ? std::complex<double>(c, 0.0)
                                                 : std::complex<double>(0.0, 0.0);
      if (r(i, j) != want) return std::nullopt;
    }
  return c;
}

int side_from_vec_dim(Eigen::Index dim) {
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dim))));
  if (static_cast<Eigen::Index>(n) * n != dim)
    throw std::invalid_argument("correlation matrix size is not a perfect square");
  return n;
}

}  // namespace

Eigen::MatrixXd build_si_correlation(const SystemParams& params) {
  const int n = params.n_t;
  const double pl = db_to_linear(params.pathloss_si_db);

  // Tap amplitude profile over antenna separation d: 1 at d = 0, then
  // base + (d-1)*step dB.
  Eigen::VectorXd amp(n);
  amp[0] = 1.0;
  for (int d = 1; d < n; ++d)
    amp[d] = db20_to_amplitude(params.crosstalk_base_db + (d - 1) * params.crosstalk_step_db);

  Eigen::MatrixXd t(n, n);
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      t(i, j) = amp[std::abs(i - j)];
      c(i, j) = std::pow(params.antenna_corr, std::abs(i - j));
    }

  // vec index a = col*n + row. Entry (a, b) = pl * T[a] * T[b] * C(row_a, row_b);
  // a Schur product of two PSD matrices, hence PSD.
  Eigen::MatrixXd r(n * n, n * n);
  for (int jc = 0; jc < n; ++jc)
    for (int ir = 0; ir < n; ++ir)
      for (int jc2 = 0; jc2 < n; ++jc2)
        for (int ir2 = 0; ir2 < n; ++ir2)
          r(jc * n + ir, jc2 * n + ir2) = pl * t(ir, jc) * t(ir2, jc2) * c(ir, ir2);
  return r;
}

SiCorrelation extract_blocks(const Eigen::MatrixXcd& r_phi0, double beta2) {
  if (r_phi0.rows() != r_phi0.cols()) throw std::invalid_argument("correlation matrix not square");
  const int n = side_from_vec_dim(r_phi0.rows());

  SiCorrelation corr;
  corr.n_t = n;
  corr.r_phi0 = r_phi0;
  corr.blocks_r.reserve(n);
  corr.blocks_rbar.reserve(n);
  corr.blocks_rtilde.reserve(n);
  for (int b = 0; b < n; ++b) {
    Eigen::MatrixXcd rn = r_phi0.block(b * n, b * n, n, n);
    Eigen::MatrixXcd rbar(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) rbar(i, j) = r_phi0(j * n + b, i * n + b);
    Eigen::MatrixXcd rtilde = rn;
    rtilde.diagonal() += beta2 * rn.diagonal();
    corr.blocks_r.push_back(std::move(rn));
    corr.blocks_rbar.push_back(std::move(rbar));
    corr.blocks_rtilde.push_back(std::move(rtilde));
  }
  corr.iid_variance = scalar_identity_factor(r_phi0);
  return corr;
}

SiCorrelation iid_si_correlation(double variance, int n_t, double beta2) {
  Eigen::MatrixXcd r = variance * Eigen::MatrixXcd::Identity(n_t * n_t, n_t * n_t);
  return extract_blocks(r, beta2);
}

SiCorrelation lmmse_error_correlation(const Eigen::MatrixXcd& r_h0, const SystemParams& params) {
  const int n = side_from_vec_dim(r_h0.rows());
  if (n != params.n_t) throw std::invalid_argument("r_h0 size does not match n_t");
  const double s = params.sigma_z_sq / params.train_energy;
  const Eigen::Index dim = r_h0.rows();

  if (s == 0.0)  // perfect-estimation limit: the error covariance vanishes
    return extract_blocks(Eigen::MatrixXcd::Zero(dim, dim), params.beta2);

  // Exact scalar shortcut keeps sigma^2*I inputs exactly scalar on output.
  if (auto c = scalar_identity_factor(r_h0)) {
    const double err = *c - (*c) * (*c) / (*c + s);
    return iid_si_correlation(err, n, params.beta2);
  }

  Eigen::MatrixXcd m = r_h0 + s * Eigen::MatrixXcd::Identity(dim, dim);
  Eigen::MatrixXcd r = r_h0 - r_h0 * m.llt().solve(r_h0);
  r = 0.5 * (r + r.adjoint().eval());  // scrub roundoff asymmetry
  return extract_blocks(r, params.beta2);
}

SiSampler::SiSampler(const Eigen::MatrixXcd& r_phi0, int n_t) : n_t_(n_t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(r_phi0);
  Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  factor_ = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

Eigen::MatrixXcd SiSampler::draw(rng::Stream& stream) const {
  Eigen::VectorXcd w(factor_.cols());
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = stream.cgauss(1.0);
  Eigen::VectorXcd v = factor_ * w;
  return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n_t_, n_t_);
}

}  // namespace fdtrx
