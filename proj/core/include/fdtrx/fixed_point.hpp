// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <functional>

#include "fdtrx/system_params.hpp"

namespace fdtrx {

enum class FixedPointStatus { Converged, Diverged, MaxIter };

struct FixedPointConfig {
  double tol = 1e-11;            // relative step tolerance
  int max_iter = 50000;
  double divergence_cap = 1e12;  // any component above this means divergence
  double norm_floor = 1e-30;     // keeps the relative test sane at x == 0
};

struct FixedPointResult {
  FixedPointStatus status = FixedPointStatus::MaxIter;
  Eigen::VectorXd x;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged() const { return status == FixedPointStatus::Converged; }
};

// Plain Picard iteration x <- f(x) for interference maps on the nonnegative
// orthant. Stops on relative step ||f(x)-x|| / max(||x||, floor) <= tol
// (Converged; the returned x is the pre-update iterate, so the inequality
// holds for it verbatim), on any component exceeding divergence_cap
// (Diverged — the infeasibility signal), or on the iteration cap (MaxIter,
// reported distinctly; callers treat it as infeasible with a warning).
// f returning NaN or negative entries throws std::runtime_error: maps fed to
// this engine are positive by construction, so that is a caller bug.
FixedPointResult fixed_point_iterate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                     const Eigen::VectorXd& x0, const FixedPointConfig& cfg);

// Config for power-valued iterations: the cap is the configured absolute one.
FixedPointConfig fp_config_for_powers(const SystemParams& params);

// Config for dual-variable iterations, whose natural scale is set by the
// map's first iterate from zero rather than by a power budget: the cap is
// 1e12 x max(f(0)). first_iterate_scale must be positive.
FixedPointConfig fp_config_for_duals(const SystemParams& params, double first_iterate_scale);

}  // namespace fdtrx
