// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/system_params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fdtrx {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

double db20_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

double SystemParams::min_noise() const {
  double m = sigma_z_sq;
  for (int i = 0; i < sigma_d_sq.size(); ++i) m = std::min(m, sigma_d_sq[i]);
  return m;
}

double SystemParams::max_noise() const {
  double m = sigma_z_sq;
  for (int i = 0; i < sigma_d_sq.size(); ++i) m = std::max(m, sigma_d_sq[i]);
  return m;
}

void SystemParams::set_uniform_targets(double gamma_lin) {
  gamma_d = Eigen::VectorXd::Constant(k, gamma_lin);
  gamma_u = Eigen::VectorXd::Constant(l, gamma_lin);
}

void SystemParams::finalize_divergence_cap() { divergence_cap = 1e12 * max_noise(); }

void SystemParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemParams: " + msg); };

  if (n_t < 1) fail("n_t must be >= 1");
  if (k < 0 || l < 0) fail("user counts must be nonnegative");
  if (gamma_d.size() != k) fail("gamma_d length != k");
  if (gamma_u.size() != l) fail("gamma_u length != l");
  if (sigma_d_sq.size() != k) fail("sigma_d_sq length != k");
  for (int i = 0; i < k; ++i) {
    if (!(gamma_d[i] > 0.0)) fail("gamma_d entries must be positive");
    if (!(sigma_d_sq[i] > 0.0)) fail("sigma_d_sq entries must be positive");
  }
  if (!(sigma_z_sq > 0.0)) fail("sigma_z_sq must be positive");
  if (beta1 < 0.0 || beta2 < 0.0 || delta1 < 0.0 || delta2 < 0.0)
    fail("impairment factors must be nonnegative");
  for (int j = 0; j < l; ++j) {
    if (!(gamma_u[j] > 0.0)) fail("gamma_u entries must be positive");
    if (gamma_u[j] * delta2 * beta2 >= 1.0)
      fail("gamma_u * delta2 * beta2 >= 1: uplink target unreachable at any power");
  }
  if (gamma_adc && !(*gamma_adc > 0.0)) fail("gamma_adc must be positive when set");
  if (!(antenna_corr > 0.0) || antenna_corr > 1.0) fail("antenna_corr must be in (0, 1]");
  if (!(train_energy > 0.0)) fail("train_energy must be positive");
  if (!(p_max > 0.0)) fail("p_max must be positive");
  if (!(tol_bisect > 0.0) || !(tol_fp > 0.0) || !(tol_ao > 0.0) || !(tol_subgrad > 0.0))
    fail("tolerances must be positive");
  if (max_iter_fp < 1 || max_iter_ao < 1 || max_iter_subgrad < 1)
    fail("iteration caps must be >= 1");
  if (!(divergence_cap > 0.0)) fail("divergence_cap must be positive");
}

SystemParams SystemParams::reference(int n_t, int k, int l, double gamma_db) {
  SystemParams p;
  p.n_t = n_t;
  p.k = k;
  p.l = l;
  p.sigma_d_sq = Eigen::VectorXd::Constant(k, p.sigma_z_sq);
  p.set_uniform_targets(db_to_linear(gamma_db));
  p.finalize_divergence_cap();
  p.validate();
  return p;
}

}  // namespace fdtrx
