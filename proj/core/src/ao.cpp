// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/ao.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>

#include "fdtrx/fixed_point.hpp"

namespace fdtrx {

DualState make_dual_state(const Eigen::VectorXd& nu, const ChannelRealization& ch,
                          const SiCorrelation& corr, const SystemParams& params) {
  DualState s;
  s.nu = nu;
  s.b_matrix = Eigen::MatrixXcd::Identity(params.n_t, params.n_t);
  for (int n = 0; n < params.n_t; ++n)
    if (nu[n] != 0.0) s.b_matrix.noalias() += nu[n] * si_antenna_coupling(n, corr, params);
  s.b_coeffs = Eigen::VectorXd::Ones(params.l);
  for (int j = 0; j < params.l; ++j)
    for (int n = 0; n < params.n_t; ++n) s.b_coeffs[j] += nu[n] * std::norm(ch.g[j][n]);
  return s;
}

std::vector<Eigen::VectorXcd> zero_forcing_init(const std::vector<Eigen::VectorXcd>& g,
                                                bool* used_fallback) {
  const int ll = static_cast<int>(g.size());
  if (used_fallback) *used_fallback = false;
  std::vector<Eigen::VectorXcd> v;
  v.reserve(ll);
  if (ll == 0) return v;
  const int nt = static_cast<int>(g[0].size());

  bool fallback = ll > nt;
  Eigen::MatrixXcd a(nt, ll);
  for (int j = 0; j < ll; ++j) a.col(j) = g[j];
  if (!fallback) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
    if (qr.rank() < ll) fallback = true;
  }
  if (fallback) {
    if (used_fallback) *used_fallback = true;
    for (int j = 0; j < ll; ++j) v.push_back(g[j].normalized());
    return v;
  }
  // Columns of A (A^H A)^{-1} satisfy col_l^H g_j = delta_{lj}.
  const Eigen::MatrixXcd pinv = a * (a.adjoint() * a).llt().solve(
                                        Eigen::MatrixXcd::Identity(ll, ll));
  for (int j = 0; j < ll; ++j) v.push_back(pinv.col(j).normalized());
  return v;
}

std::vector<Eigen::VectorXcd> mmse_receive(const std::vector<Eigen::VectorXcd>& w,
                                           const Eigen::VectorXd& p_u,
                                           const ChannelRealization& ch, const SiCorrelation& corr,
                                           const SystemParams& params) {
  const int nt = params.n_t;
  Eigen::MatrixXcd m = si_rx_covariance(w, corr, params);
  m.noalias() += params.sigma_z_tilde_sq() * Eigen::MatrixXcd::Identity(nt, nt);
  for (int j = 0; j < params.l; ++j) m.noalias() += p_u[j] * impaired_outer(ch.g[j], params.d2b2());
  const Eigen::LLT<Eigen::MatrixXcd> llt(m);
  std::vector<Eigen::VectorXcd> v;
  v.reserve(params.l);
  for (int j = 0; j < params.l; ++j) v.push_back(llt.solve(ch.g[j]).normalized());
  return v;
}

DualityMap::DualityMap(const std::vector<Eigen::VectorXcd>& v, const ChannelRealization& ch,
                       const SiCorrelation& corr, const SystemParams& params,
                       const DualState& dual) {
  kk_ = params.k;
  ll_ = params.l;
  rho_d_.resize(kk_);
  for (int i = 0; i < kk_; ++i) rho_d_[i] = params.rho_d(i);
  rho_u_.resize(ll_);
  for (int j = 0; j < ll_; ++j) rho_u_[j] = params.rho_u(j);
  h_ = ch.h;
  h_coupling_.reserve(kk_);
  for (const auto& hi : ch.h) h_coupling_.push_back(impaired_outer(hi, params.beta1));
  v_coupling_.reserve(ll_);
  for (const auto& vl : v) v_coupling_.push_back(si_tx_coupling(vl, corr, params));
  b_matrix_ = dual.b_matrix;
  b_coeffs_ = dual.b_coeffs;

  g_quad_.resize(ll_, ll_);
  vg_sq_.resize(ll_);
  std::vector<Eigen::MatrixXcd> g_coupling;
  g_coupling.reserve(ll_);
  for (const auto& gj : ch.g) g_coupling.push_back(impaired_outer(gj, params.d2b2()));
  for (int l = 0; l < ll_; ++l) {
    for (int j = 0; j < ll_; ++j) g_quad_(l, j) = (v[l].dot(g_coupling[j] * v[l])).real();
    vg_sq_[l] = std::norm(v[l].dot(ch.g[l]));
    if (!(vg_sq_[l] > 0.0))
      throw std::runtime_error("DualityMap: receive beamformer orthogonal to its own channel");
  }
  f_sq_.resize(ll_, kk_);
  for (int l = 0; l < ll_; ++l)
    for (int i = 0; i < kk_; ++i) f_sq_(l, i) = std::norm(ch.f(l, i));
}

Eigen::MatrixXcd DualityMap::q_matrix(const Eigen::VectorXd& x) const {
  Eigen::MatrixXcd q = b_matrix_;
  for (int i = 0; i < kk_; ++i) q.noalias() += x[i] * h_coupling_[i];
  for (int l = 0; l < ll_; ++l) q.noalias() += x[kk_ + l] * v_coupling_[l];
  return q;
}

Eigen::VectorXd DualityMap::operator()(const Eigen::VectorXd& x) const {
  Eigen::VectorXd next(kk_ + ll_);
  const Eigen::LLT<Eigen::MatrixXcd> llt(q_matrix(x));
  for (int i = 0; i < kk_; ++i) next[i] = rho_d_[i] / (h_[i].dot(llt.solve(h_[i]))).real();
  const Eigen::VectorXd mu = x.tail(ll_);
  const Eigen::VectorXd lam = x.head(kk_);
  for (int l = 0; l < ll_; ++l) {
    const double load = g_quad_.row(l).dot(mu) + f_sq_.row(l).dot(lam) + b_coeffs_[l];
    next[kk_ + l] = rho_u_[l] * load / vg_sq_[l];
  }
  return next;
}

PowerAllocation allocate_powers(const std::vector<Eigen::VectorXcd>& wtilde,
                                const std::vector<Eigen::VectorXcd>& v,
                                const ChannelRealization& ch, const SiCorrelation& corr,
                                const SystemParams& params, const DualState& dual) {
  (void)dual;  // the tight-constraint system is dual-free; kept for signature symmetry
  const int kk = params.k;
  const int ll = params.l;
  const int dim = kk + ll;

  std::vector<Eigen::MatrixXcd> h_coupling;
  h_coupling.reserve(kk);
  for (const auto& hi : ch.h) h_coupling.push_back(impaired_outer(hi, params.beta1));
  std::vector<Eigen::MatrixXcd> g_coupling;
  g_coupling.reserve(ll);
  for (const auto& gj : ch.g) g_coupling.push_back(impaired_outer(gj, params.d2b2()));

  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs(dim);
  for (int i = 0; i < kk; ++i) {
    for (int j = 0; j < kk; ++j) {
      s(i, j) = -(wtilde[j].dot(h_coupling[i] * wtilde[j])).real();
      if (i == j) s(i, j) += std::norm(ch.h[i].dot(wtilde[i])) / params.rho_d(i);
    }
    for (int l = 0; l < ll; ++l) s(i, kk + l) = -std::norm(ch.f(l, i));
    rhs[i] = params.sigma_d_sq[i];
  }
  for (int l = 0; l < ll; ++l) {
    const Eigen::MatrixXcd coupling = si_tx_coupling(v[l], corr, params);
    for (int j = 0; j < kk; ++j) s(kk + l, j) = -(wtilde[j].dot(coupling * wtilde[j])).real();
    for (int j = 0; j < ll; ++j) {
      s(kk + l, kk + j) = -(v[l].dot(g_coupling[j] * v[l])).real();
      if (j == l) s(kk + l, kk + j) += std::norm(v[l].dot(ch.g[l])) / params.rho_u(l);
    }
    rhs[kk + l] = params.sigma_z_tilde_sq();
  }

  Eigen::VectorXd p = s.partialPivLu().solve(rhs);
  if (!p.allFinite() || (p.array() <= 0.0).any() ||
      (s * p - rhs).norm() > 1e-9 * rhs.norm() + 1e-300)
    throw SolverInconsistency("allocate_powers: tight-constraint system infeasible");

  PowerAllocation out;
  out.p_d = p.head(kk);
  out.p_u = p.tail(ll);
  return out;
}

WeightedQosSolution solve_weighted_qos(const std::vector<Eigen::VectorXcd>& v,
                                       const DualState& dual, const ChannelRealization& ch,
                                       const SiCorrelation& corr, const SystemParams& params) {
  WeightedQosSolution out;
  const DualityMap map(v, ch, corr, params, dual);
  const int dim = params.k + params.l;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  const double scale = dim > 0 ? map(zero).maxCoeff() : 1.0;

  const FixedPointResult fp =
      fixed_point_iterate([&map](const Eigen::VectorXd& x) { return map(x); }, zero,
                          fp_config_for_duals(params, scale));
  out.iterations = fp.iterations;
  switch (fp.status) {
    case FixedPointStatus::Converged: break;
    case FixedPointStatus::Diverged: out.status = SolveStatus::InfeasibleDiverged; return out;
    default: out.status = SolveStatus::InfeasibleMaxIter; return out;
  }
  out.lambda = fp.x.head(params.k);
  out.mu = fp.x.tail(params.l);

  const Eigen::LLT<Eigen::MatrixXcd> llt(map.q_matrix(fp.x));
  out.wtilde.reserve(params.k);
  for (int i = 0; i < params.k; ++i) {
    Eigen::VectorXcd dir = llt.solve(ch.h[i]).normalized();
    const std::complex<double> gain = ch.h[i].dot(dir);
    if (std::abs(gain) > 0.0) dir *= std::conj(gain) / std::abs(gain);
    out.wtilde.push_back(std::move(dir));
  }

  try {
    PowerAllocation alloc = allocate_powers(out.wtilde, v, ch, corr, params, dual);
    out.p_d = std::move(alloc.p_d);
    out.p_u = std::move(alloc.p_u);
  } catch (const SolverInconsistency&) {
    out.status = SolveStatus::InfeasibleNumeric;
    return out;
  }
  out.w.reserve(params.k);
  for (int i = 0; i < params.k; ++i) out.w.push_back(std::sqrt(out.p_d[i]) * out.wtilde[i]);
  out.status = SolveStatus::Solved;
  return out;
}

InnerSolution solve_qos_fixed_receive(const std::vector<Eigen::VectorXcd>& v,
                                      const ChannelRealization& ch, const SiCorrelation& corr,
                                      const SystemParams& params) {
  InnerSolution out;
  out.nu = Eigen::VectorXd::Zero(params.n_t);

  auto adopt = [&](const WeightedQosSolution& sol) {
    out.w = sol.w;
    out.p_u = sol.p_u;
    out.p_d = sol.p_d;
  };

  if (!params.gamma_adc) {
    const DualState dual = make_dual_state(out.nu, ch, corr, params);
    const WeightedQosSolution sol = solve_weighted_qos(v, dual, ch, corr, params);
    out.status = sol.status;
    if (solved(sol.status)) adopt(sol);
    return out;
  }

  const double cap = *params.gamma_adc;
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(params.n_t);
  std::optional<InnerSolution> best;

  for (int round = 0; round < params.max_iter_subgrad; ++round) {
    const DualState dual = make_dual_state(nu, ch, corr, params);
    const WeightedQosSolution sol = solve_weighted_qos(v, dual, ch, corr, params);
    out.subgradient_rounds = round + 1;
    if (!solved(sol.status)) {
      if (round == 0) {
        out.status = sol.status;
        return out;
      }
      // The weighted problem's feasible set does not depend on the duals, so
      // a failure here is a numerical stall; keep the best iterate so far.
      out.note = "weighted solve failed mid-subgradient; kept best feasible iterate";
      break;
    }

    TransceiverSolution cand;
    cand.w = sol.w;
    cand.v.assign(v.begin(), v.end());
    cand.p_u = sol.p_u;
    const Eigen::VectorXd adc = adc_power(cand, ch, corr, params);
    const double worst_violation = (adc.array() / cap - 1.0).maxCoeff();
    if (worst_violation <= 1e-4) {
      if (!best || sol.total_power() < best->total_power()) {
        InnerSolution b;
        b.status = SolveStatus::Solved;
        b.w = sol.w;
        b.p_u = sol.p_u;
        b.p_d = sol.p_d;
        b.nu = nu;
        b.adc_active = worst_violation > -1e-9 || nu.maxCoeff() > 0.0;
        best = std::move(b);
      }
    }

    const Eigen::VectorXd next = (nu + (adc.array() - cap).matrix()).cwiseMax(0.0);
    const double change = (next - nu).norm() / std::max(nu.norm(), 1e-30);
    nu = next;
    if (change <= params.tol_subgrad) break;
  }

  if (!best) {
    out.status = SolveStatus::InfeasibleNumeric;
    out.note = "no iterate satisfied the ADC cap within tolerance";
    return out;
  }
  const int rounds = out.subgradient_rounds;
  const std::string note = out.note;
  out = std::move(*best);
  out.subgradient_rounds = rounds;
  if (!note.empty()) out.note = note;
  return out;
}

AlternatingResult solve_alternating(const ChannelRealization& ch, const SiCorrelation& corr,
                                    const SystemParams& params) {
  AlternatingResult out;
  std::vector<Eigen::VectorXcd> v = zero_forcing_init(ch.g, &out.trace.zf_fallback);

  InnerSolution inner = solve_qos_fixed_receive(v, ch, corr, params);
  out.iterations = 1;
  if (!solved(inner.status)) {
    out.status = inner.status;
    return out;
  }

  auto assemble = [&](const InnerSolution& in, const std::vector<Eigen::VectorXcd>& vin) {
    out.sol.w = in.w;
    out.sol.v = vin;
    out.sol.p_u = in.p_u;
    out.nu = in.nu;
    out.total_power = in.total_power();
  };
  assemble(inner, v);
  out.trace.objective.push_back(inner.total_power());
  out.status = SolveStatus::Solved;

  for (int t = 2; t <= params.max_iter_ao; ++t) {
    const std::vector<Eigen::VectorXcd> v_next = mmse_receive(inner.w, inner.p_u, ch, corr, params);
    const InnerSolution next = solve_qos_fixed_receive(v_next, ch, corr, params);
    if (!solved(next.status)) {
      out.trace.stalled = true;
      out.trace.note = "inner solve failed after a receive update; returning last good iterate";
      break;
    }
    const double prev = out.total_power;
    if (next.total_power() > prev) break;  // numerical stall; keep the better iterate
    out.iterations = t;
    assemble(next, v_next);
    out.trace.objective.push_back(next.total_power());
    const double improvement = (prev - next.total_power()) / std::max(prev, 1e-300);
    if (improvement <= params.tol_ao) break;
    inner = next;
    v = v_next;
  }
  return out;
}

}  // namespace fdtrx
