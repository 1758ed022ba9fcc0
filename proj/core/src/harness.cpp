// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "fdtrx/ao.hpp"
#include "fdtrx/bisection.hpp"
#include "fdtrx/metrics.hpp"
#include "fdtrx/rng.hpp"

namespace fdtrx {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Ao: return "ao";
    case Algorithm::Bisection: return "bisection";
    case Algorithm::Hd: return "hd";
    default: return "zf_oneshot";
  }
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ao") return Algorithm::Ao;
  if (name == "bisection") return Algorithm::Bisection;
  if (name == "hd") return Algorithm::Hd;
  if (name == "zf_oneshot") return Algorithm::ZfOneshot;
  throw std::runtime_error("unknown algorithm: " + name);
}

double hd_target(double gamma) { return (1.0 + gamma) * (1.0 + gamma) - 1.0; }

double SweepAxis::value_at(size_t i) const {
  if (kind == Kind::GammaDb) return gamma_db[i];
  return static_cast<double>(users[i].first) * 1000.0 + static_cast<double>(users[i].second);
}

std::string SweepAxis::label_at(size_t i) const {
  if (kind == Kind::GammaDb) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", gamma_db[i]);
    return buf;
  }
  return std::to_string(users[i].first) + "x" + std::to_string(users[i].second);
}

uint64_t SweepAxis::bits_at(size_t i) const {
  if (kind == Kind::GammaDb) return std::bit_cast<uint64_t>(gamma_db[i]);
  return (static_cast<uint64_t>(users[i].first) << 32) | static_cast<uint64_t>(users[i].second);
}

void Scenario::validate() const {
  if (sweep.size() == 0) throw std::runtime_error("Scenario: empty sweep");
  if (trials < 1) throw std::runtime_error("Scenario: trials must be >= 1");
  if (algorithms.empty()) throw std::runtime_error("Scenario: no algorithms requested");
  for (size_t i = 0; i < sweep.size(); ++i) params_at(i).validate();
}

SystemParams Scenario::params_at(size_t sweep_index) const {
  SystemParams p = base;
  if (sweep.kind == SweepAxis::Kind::GammaDb) {
    p.set_uniform_targets(db_to_linear(sweep.gamma_db[sweep_index]));
  } else {
    const auto [kk, ll] = sweep.users[sweep_index];
    const double noise = p.sigma_d_sq.size() > 0 ? p.sigma_d_sq[0] : p.sigma_z_sq;
    p.k = kk;
    p.l = ll;
    p.sigma_d_sq = Eigen::VectorXd::Constant(kk, noise);
    p.set_uniform_targets(db_to_linear(gamma_db));
  }
  if (!divergence_cap_overridden) p.finalize_divergence_cap();
  return p;
}

SiCorrelation Scenario::correlation_at(size_t sweep_index) const {
  const SystemParams p = params_at(sweep_index);
  if (correlation_mode == CorrelationMode::Iid) {
    const Eigen::MatrixXcd r_h0 = db_to_linear(sigma_h0_sq_db) *
                                  Eigen::MatrixXcd::Identity(p.n_t * p.n_t, p.n_t * p.n_t);
    return lmmse_error_correlation(r_h0, p);
  }
  return lmmse_error_correlation(build_si_correlation(p), p);
}

Scenario Scenario::reference(int n_t, int k, int l, std::vector<double> gamma_db_sweep, int trials,
                             uint64_t master_seed) {
  Scenario sc;
  sc.base = SystemParams::reference(n_t, k, l, gamma_db_sweep.empty() ? 5.0 : gamma_db_sweep[0]);
  sc.sweep.kind = SweepAxis::Kind::GammaDb;
  sc.sweep.gamma_db = std::move(gamma_db_sweep);
  sc.trials = trials;
  sc.master_seed = master_seed;
  sc.algorithms = {Algorithm::Ao, Algorithm::ZfOneshot, Algorithm::Bisection, Algorithm::Hd};
  sc.correlation_mode = CorrelationMode::Iid;
  sc.validate();
  return sc;
}

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

TrialResult run_algorithm(Algorithm alg, const SystemParams& params, const SiCorrelation& corr,
                          const ChannelRealization& ch, CorrelationMode mode) {
  TrialResult res;
  res.algorithm = alg;
  const Timer timer;

  switch (alg) {
    case Algorithm::Ao:
    case Algorithm::ZfOneshot: {
      SystemParams p = params;
      if (alg == Algorithm::ZfOneshot) p.max_iter_ao = 1;
      const AlternatingResult r = solve_alternating(ch, corr, p);
      res.feasible = solved(r.status);
      res.iterations = r.iterations;
      res.note = r.trace.note;
      if (res.feasible) {
        res.total_power = r.total_power;
        res.max_adc_power = adc_power(r.sol, ch, corr, p).maxCoeff();
      } else {
        res.note = to_string(r.status);
      }
      break;
    }
    case Algorithm::Bisection: {
      // A structured (non-white) correlation needs the explicit worst-case bound.
      const bool worst_case = mode == CorrelationMode::Structured;
      const BisectionResult r = solve_bisection(ch, corr, params, worst_case);
      res.feasible = solved(r.status);
      res.iterations = r.iterations;
      if (res.feasible) {
        res.total_power = r.total_power;
        res.max_adc_power = adc_power(r.sol, ch, corr, params).maxCoeff();
      } else {
        res.note = to_string(r.status);
      }
      break;
    }
    case Algorithm::Hd: {
      // Half-duplex reference: both links at the equal-spectral-efficiency
      // target, no self- or cross-interference, plain uplink couplings.
      Eigen::VectorXd gd(params.k), gu(params.l);
      for (int i = 0; i < params.k; ++i) gd[i] = hd_target(params.gamma_d[i]);
      for (int j = 0; j < params.l; ++j) gu[j] = hd_target(params.gamma_u[j]);
      const DlBeamforming dl = solve_hd_dl(ch.h, gd, params.sigma_d_sq, params);
      const UlPowerControl ul =
          solve_hd_ul(ch.g, gu, params.sigma_z_sq, /*impaired=*/false, params);
      res.feasible = solved(dl.status) && solved(ul.status);
      res.iterations = dl.iterations + ul.iterations;
      if (res.feasible) {
        double total = ul.p.sum();
        for (const auto& wk : dl.w) total += wk.squaredNorm();
        res.total_power = total;
        // The BS only listens while receiving, so its ADC sees the uplink alone.
        TransceiverSolution listen;
        listen.w.assign(params.k, Eigen::VectorXcd::Zero(params.n_t));
        listen.v = ul.v;
        listen.p_u = ul.p;
        res.max_adc_power = adc_power(listen, ch, corr, params).maxCoeff();
      } else {
        res.note = solved(dl.status) ? to_string(ul.status) : to_string(dl.status);
      }
      break;
    }
  }
  res.wall_time = timer.seconds();
  return res;
}

std::vector<TrialResult> run_trial_cell(const Scenario& scenario, const SystemParams& params,
                                        const SiCorrelation& corr, size_t sweep_index,
                                        int trial_index) {
  const uint64_t seed = rng::derive(scenario.master_seed, "trial",
                                    scenario.sweep.bits_at(sweep_index),
                                    static_cast<uint64_t>(trial_index));
  const ChannelRealization ch = sample_realization(params, seed);
  std::vector<TrialResult> out;
  out.reserve(scenario.algorithms.size());
  for (Algorithm alg : scenario.algorithms)
    out.push_back(run_algorithm(alg, params, corr, ch, scenario.correlation_mode));
  return out;
}

int resolve_thread_count(int thread_cap, size_t cells) {
  int n = thread_cap;
  if (n <= 0) {
    if (const char* env = std::getenv("FDTRX_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  return static_cast<int>(std::min<size_t>(n, std::max<size_t>(cells, 1)));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::vector<TrialResult> run_trial(const Scenario& scenario, size_t sweep_index, int trial_index) {
  const SystemParams params = scenario.params_at(sweep_index);
  const SiCorrelation corr = scenario.correlation_at(sweep_index);
  return run_trial_cell(scenario, params, corr, sweep_index, trial_index);
}

std::vector<AggregateRow> run_montecarlo(const Scenario& scenario, int thread_cap) {
  scenario.validate();
  const size_t n_sweep = scenario.sweep.size();
  const size_t n_alg = scenario.algorithms.size();
  const size_t cells = n_sweep * static_cast<size_t>(scenario.trials);

  // Everything an individual cell needs is precomputed or derived from the
  // cell index, so execution order cannot affect the results.
  std::vector<SystemParams> params(n_sweep);
  std::vector<SiCorrelation> corr(n_sweep);
  for (size_t i = 0; i < n_sweep; ++i) {
    params[i] = scenario.params_at(i);
    corr[i] = scenario.correlation_at(i);
  }

  std::vector<std::vector<TrialResult>> results(cells);
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (size_t cell = cursor.fetch_add(1); cell < cells; cell = cursor.fetch_add(1)) {
      const size_t si = cell / scenario.trials;
      const int trial = static_cast<int>(cell % scenario.trials);
      results[cell] = run_trial_cell(scenario, params[si], corr[si], si, trial);
    }
  };

  const int threads = resolve_thread_count(thread_cap, cells);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<AggregateRow> rows;
  rows.reserve(n_sweep * n_alg);
  for (size_t si = 0; si < n_sweep; ++si) {
    std::vector<int> feasible_count(n_alg, 0);
    std::vector<double> power_sum(n_alg, 0.0);
    std::vector<double> adc_sum(n_alg, 0.0);
    int mutual = 0;
    for (int t = 0; t < scenario.trials; ++t) {
      const auto& cell = results[si * scenario.trials + t];
      bool all_feasible = true;
      for (size_t a = 0; a < n_alg; ++a) {
        if (cell[a].feasible) ++feasible_count[a];
        else all_feasible = false;
      }
      if (!all_feasible) continue;
      ++mutual;
      for (size_t a = 0; a < n_alg; ++a) {
        power_sum[a] += cell[a].total_power;
        adc_sum[a] += cell[a].max_adc_power;
      }
    }
    for (size_t a = 0; a < n_alg; ++a) {
      AggregateRow row;
      row.sweep_label = scenario.sweep.label_at(si);
      row.sweep_value = scenario.sweep.value_at(si);
      row.algorithm = scenario.algorithms[a];
      row.feasibility_rate = static_cast<double>(feasible_count[a]) / scenario.trials;
      row.mean_sum_power_dbm =
          mutual > 0 ? linear_to_db(power_sum[a] / mutual) : std::nan("");
      row.mean_adc_power_dbm =
          mutual > 0 ? linear_to_db(adc_sum[a] / mutual) : std::nan("");
      row.trials = scenario.trials;
      rows.push_back(std::move(row));
    }
  }

  std::sort(rows.begin(), rows.end(), [](const AggregateRow& a, const AggregateRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return std::string(algorithm_name(a.algorithm)) < algorithm_name(b.algorithm);
  });
  return rows;
}

std::string format_csv(const std::vector<AggregateRow>& rows) {
  std::string out = "sweep,algorithm,feasibility_rate,mean_sum_power_dbm,mean_adc_power_dbm,trials\n";
  for (const auto& r : rows) {
    out += r.sweep_label;
    out += ',';
    out += algorithm_name(r.algorithm);
    out += ',';
    out += format_double(r.feasibility_rate);
    out += ',';
    out += format_double(r.mean_sum_power_dbm);
    out += ',';
    out += format_double(r.mean_adc_power_dbm);
    out += ',';
    out += std::to_string(r.trials);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
  f << format_csv(rows);
  if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

}  // namespace fdtrx
