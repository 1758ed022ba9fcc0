// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/hd_solvers.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "fdtrx/metrics.hpp"

namespace fdtrx {
namespace {

SolveStatus status_from_fp(const FixedPointResult& fp) {
  switch (fp.status) {
    case FixedPointStatus::Converged: return SolveStatus::Solved;
    case FixedPointStatus::Diverged: return SolveStatus::InfeasibleDiverged;
    default: return SolveStatus::InfeasibleMaxIter;
  }
}

// Solve the tight-constraint linear system a * p = rhs and accept the result
// only when it is finite, strictly positive, and actually solves the system.
bool positive_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs, Eigen::VectorXd* out) {
  if (a.rows() == 0) {
    out->resize(0);
    return true;
  }
  Eigen::VectorXd p = a.partialPivLu().solve(rhs);
  if (!p.allFinite() || (p.array() <= 0.0).any()) return false;
  if ((a * p - rhs).norm() > 1e-9 * rhs.norm() + 1e-300) return false;
  *out = std::move(p);
  return true;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::InfeasibleDiverged: return "infeasible_diverged";
    case SolveStatus::InfeasibleMaxIter: return "infeasible_max_iter";
    default: return "infeasible_numeric";
  }
}

UlPowerControl solve_hd_ul(const std::vector<Eigen::VectorXcd>& g, const Eigen::VectorXd& gamma_u,
                           double noise, bool impaired, const SystemParams& params) {
  const int ll = static_cast<int>(g.size());
  if (gamma_u.size() != ll) throw std::invalid_argument("solve_hd_ul: gamma_u length mismatch");
  if (!(noise > 0.0)) throw std::invalid_argument("solve_hd_ul: noise must be positive");

  UlPowerControl out;
  if (ll == 0) {
    out.status = SolveStatus::Solved;
    out.p.resize(0);
    return out;
  }
  const int nt = static_cast<int>(g[0].size());
  const double dfac = impaired ? params.d2b2() : 0.0;

  std::vector<Eigen::MatrixXcd> cov;
  cov.reserve(ll);
  for (const auto& gj : g) cov.push_back(impaired_outer(gj, dfac));

  Eigen::VectorXd rho(ll);
  for (int j = 0; j < ll; ++j) rho[j] = gamma_u[j] / (1.0 + gamma_u[j]);

  auto whiten = [&](const Eigen::VectorXd& p) {
    Eigen::MatrixXcd m = noise * Eigen::MatrixXcd::Identity(nt, nt);
    for (int j = 0; j < ll; ++j) m.noalias() += p[j] * cov[j];
    return Eigen::LLT<Eigen::MatrixXcd>(m);
  };

  auto map = [&](const Eigen::VectorXd& p) {
    const auto llt = whiten(p);
    Eigen::VectorXd next(ll);
    for (int j = 0; j < ll; ++j) next[j] = rho[j] / (g[j].dot(llt.solve(g[j]))).real();
    return next;
  };

  const FixedPointResult fp =
      fixed_point_iterate(map, Eigen::VectorXd::Zero(ll), fp_config_for_powers(params));
  out.iterations = fp.iterations;
  out.status = status_from_fp(fp);
  if (!solved(out.status)) return out;

  const auto llt = whiten(fp.x);
  out.v.reserve(ll);
  for (int j = 0; j < ll; ++j) out.v.push_back(llt.solve(g[j]).normalized());

  // Tight-constraint polish at the returned beamformers:
  // p_l |v_l^H g_l|^2 / rho_l - sum_j p_j v_l^H C_j v_l = noise.
  Eigen::MatrixXd t(ll, ll);
  for (int j = 0; j < ll; ++j)
    for (int i = 0; i < ll; ++i) {
      t(j, i) = -(out.v[j].dot(cov[i] * out.v[j])).real();
      if (i == j) t(j, i) += std::norm(out.v[j].dot(g[j])) / rho[j];
    }
  out.p = fp.x;
  Eigen::VectorXd polished;
  if (positive_solve(t, Eigen::VectorXd::Constant(ll, noise), &polished)) out.p = polished;
  return out;
}

DlBeamforming solve_hd_dl(const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXd& gamma_d,
                          const Eigen::VectorXd& noise_vec, const SystemParams& params,
                          const Eigen::MatrixXcd* base) {
  const int kk = static_cast<int>(h.size());
  if (gamma_d.size() != kk) throw std::invalid_argument("solve_hd_dl: gamma_d length mismatch");
  if (noise_vec.size() != kk) throw std::invalid_argument("solve_hd_dl: noise_vec length mismatch");
  if ((noise_vec.array() <= 0.0).any())
    throw std::invalid_argument("solve_hd_dl: noise_vec must be positive");

  DlBeamforming out;
  if (kk == 0) {
    out.status = SolveStatus::Solved;
    out.p.resize(0);
    out.lambda.resize(0);
    return out;
  }
  const int nt = static_cast<int>(h[0].size());
  const Eigen::MatrixXcd b =
      base ? *base : Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(nt, nt));

  std::vector<Eigen::MatrixXcd> coupling;
  coupling.reserve(kk);
  for (const auto& hi : h) coupling.push_back(impaired_outer(hi, params.beta1));

  Eigen::VectorXd rho(kk);
  for (int i = 0; i < kk; ++i) rho[i] = gamma_d[i] / (1.0 + gamma_d[i]);

  auto whiten = [&](const Eigen::VectorXd& lam) {
    Eigen::MatrixXcd q = b;
    for (int i = 0; i < kk; ++i) q.noalias() += lam[i] * coupling[i];
    return Eigen::LLT<Eigen::MatrixXcd>(q);
  };

  auto map = [&](const Eigen::VectorXd& lam) {
    const auto llt = whiten(lam);
    Eigen::VectorXd next(kk);
    for (int i = 0; i < kk; ++i) next[i] = rho[i] / (h[i].dot(llt.solve(h[i]))).real();
    return next;
  };

  const Eigen::VectorXd first = map(Eigen::VectorXd::Zero(kk));
  const FixedPointResult fp = fixed_point_iterate(
      map, Eigen::VectorXd::Zero(kk), fp_config_for_duals(params, first.maxCoeff()));
  out.iterations = fp.iterations;
  out.status = status_from_fp(fp);
  if (!solved(out.status)) return out;
  out.lambda = fp.x;

  const auto llt = whiten(fp.x);
  out.wtilde.reserve(kk);
  for (int i = 0; i < kk; ++i) {
    Eigen::VectorXcd dir = llt.solve(h[i]).normalized();
    const std::complex<double> gain = h[i].dot(dir);
    if (std::abs(gain) > 0.0) dir *= std::conj(gain) / std::abs(gain);  // h_i^H wtilde_i real > 0
    out.wtilde.push_back(std::move(dir));
  }

  Eigen::MatrixXd a(kk, kk);
  for (int i = 0; i < kk; ++i)
    for (int j = 0; j < kk; ++j) {
      a(i, j) = -(out.wtilde[j].dot(coupling[i] * out.wtilde[j])).real();
      if (i == j) a(i, j) += std::norm(h[i].dot(out.wtilde[i])) / rho[i];
    }
  if (!positive_solve(a, noise_vec, &out.p)) {
    out.status = SolveStatus::InfeasibleNumeric;
    return out;
  }
  out.w.reserve(kk);
  for (int i = 0; i < kk; ++i) out.w.push_back(std::sqrt(out.p[i]) * out.wtilde[i]);
  return out;
}

}  // namespace fdtrx
