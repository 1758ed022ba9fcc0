// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/fixed_point.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdtrx {

FixedPointResult fixed_point_iterate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x0, const FixedPointConfig& cfg) {
  FixedPointResult res;
  Eigen::VectorXd x = x0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    Eigen::VectorXd next = f(x);
    if (next.size() != x.size()) throw std::runtime_error("fixed_point_iterate: map changed dimension");
    for (Eigen::Index i = 0; i < next.size(); ++i) {
      if (std::isnan(next[i]) || next[i] < 0.0)
        throw std::runtime_error("fixed_point_iterate: map produced NaN or negative component");
    }
    res.iterations = it;
    if ((next.array() > cfg.divergence_cap).any()) {
      res.status = FixedPointStatus::Diverged;
      res.x = std::move(next);
      res.final_residual = std::numeric_limits<double>::infinity();
      return res;
    }
    const double residual = (next - x).norm() / std::max(x.norm(), cfg.norm_floor);
    res.final_residual = residual;
    if (residual <= cfg.tol) {
      res.status = FixedPointStatus::Converged;
      res.x = std::move(x);  // pre-update iterate: the stop test holds for it as returned
      return res;
    }
    x = std::move(next);
  }
  res.status = FixedPointStatus::MaxIter;
  res.x = std::move(x);
  return res;
}

FixedPointConfig fp_config_for_powers(const SystemParams& params) {
  FixedPointConfig cfg;
  cfg.tol = params.tol_fp;
  cfg.max_iter = params.max_iter_fp;
  cfg.divergence_cap = params.divergence_cap;
  return cfg;
}

FixedPointConfig fp_config_for_duals(const SystemParams& params, double first_iterate_scale) {
  FixedPointConfig cfg;
  cfg.tol = params.tol_fp;
  cfg.max_iter = params.max_iter_fp;
  cfg.divergence_cap = 1e12 * first_iterate_scale;
  return cfg;
}

}  // namespace fdtrx
