// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fdtrx/channel.hpp"
#include "fdtrx/si_correlation.hpp"
#include "fdtrx/system_params.hpp"

namespace fdtrx {

enum class Algorithm { Ao, Bisection, Hd, ZfOneshot };
const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);  // throws on unknown names

// Equal-spectral-efficiency target for a half-duplex system that must move
// the same bits in half the channel uses: (1 + gamma)^2 - 1.
double hd_target(double gamma);

// What is swept across the experiment: one SINR target (dB) applied to every
// user, or the (k, l) user counts at a fixed target.
struct SweepAxis {
  enum class Kind { GammaDb, Users };
  Kind kind = Kind::GammaDb;
  std::vector<double> gamma_db;
  std::vector<std::pair<int, int>> users;

  size_t size() const { return kind == Kind::GammaDb ? gamma_db.size() : users.size(); }
  // Numeric value used for row sorting and the trial-seed derivation.
  double value_at(size_t i) const;
  // CSV label: the gamma value, or "KxL".
  std::string label_at(size_t i) const;
  // Stable bit pattern of the sweep value for seed derivation.
  uint64_t bits_at(size_t i) const;
};

enum class CorrelationMode { Structured, Iid };

// One reproducible experiment: base parameters, the sweep, the trial count,
// the master seed, and which algorithms run on every trial's realization.
struct Scenario {
  SystemParams base;      // per-user targets are filled in per sweep point
  double gamma_db = 5.0;  // target used when sweeping user counts
  SweepAxis sweep;
  int trials = 1;
  uint64_t master_seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::Ao};
  CorrelationMode correlation_mode = CorrelationMode::Structured;
  double sigma_h0_sq_db = -10.0;  // raw SI tap variance in the white mode
  bool divergence_cap_overridden = false;

  void validate() const;
  SystemParams params_at(size_t sweep_index) const;
  SiCorrelation correlation_at(size_t sweep_index) const;

  // Desk-scale stock scenario used by tests and as a CLI starting point.
  static Scenario reference(int n_t, int k, int l, std::vector<double> gamma_db_sweep, int trials,
                            uint64_t master_seed);
};

// Scenario JSON: all powers in dBm, all gains/factors in dB (see README for
// the schema). Throws std::runtime_error with context on malformed input.
Scenario scenario_from_json(const std::string& text);
Scenario scenario_from_json_file(const std::string& path);

struct TrialResult {
  Algorithm algorithm = Algorithm::Ao;
  bool feasible = false;
  double total_power = 0.0;    // mW; meaningful iff feasible
  double max_adc_power = 0.0;  // mW; worst antenna
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  std::string note;
};

// Runs every requested algorithm on the same seeded channel realization.
std::vector<TrialResult> run_trial(const Scenario& scenario, size_t sweep_index, int trial_index);

struct AggregateRow {
  std::string sweep_label;
  double sweep_value = 0.0;
  Algorithm algorithm = Algorithm::Ao;
  double feasibility_rate = 0.0;
  double mean_sum_power_dbm = 0.0;  // mean over mutually feasible trials, linear then dBm
  double mean_adc_power_dbm = 0.0;
  int trials = 0;
};

// Full experiment: all (sweep point x trial) cells, averaged under the
// mutual-feasibility rule (a trial counts toward the means only when every
// requested algorithm was feasible on it). Deterministic for a given
// master seed regardless of how many worker threads execute the cells;
// thread_cap 0 defers to FDTRX_THREADS or the hardware concurrency.
std::vector<AggregateRow> run_montecarlo(const Scenario& scenario, int thread_cap = 0);

std::string format_csv(const std::vector<AggregateRow>& rows);
void emit_csv(const std::vector<AggregateRow>& rows, const std::string& path);

}  // namespace fdtrx
