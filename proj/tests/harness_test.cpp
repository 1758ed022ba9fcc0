// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdtrx/harness.hpp"
#include "fdtrx/hd_solvers.hpp"
#include "fdtrx/metrics.hpp"
#include "fdtrx/rng.hpp"
#include "support.hpp"

using namespace fdtrx;
using test::rel_err;

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

TEST_CASE("half-duplex target doubles the per-slot spectral efficiency") {
  CHECK(hd_target(0.0) == 0.0);
  CHECK(hd_target(1.0) == doctest::Approx(3.0).epsilon(1e-15));
  double g = std::sqrt(10.0);
  CHECK(rel_err(hd_target(g), 10.0 + 2.0 * g) < 1e-14);
}

TEST_CASE("algorithm names round-trip") {
  for (Algorithm a : {Algorithm::Ao, Algorithm::Bisection, Algorithm::Hd, Algorithm::ZfOneshot})
    CHECK(algorithm_from_name(algorithm_name(a)) == a);
  CHECK(std::string(algorithm_name(Algorithm::Ao)) == "ao");
  CHECK(std::string(algorithm_name(Algorithm::Bisection)) == "bisection");
  CHECK(std::string(algorithm_name(Algorithm::Hd)) == "hd");
  CHECK(std::string(algorithm_name(Algorithm::ZfOneshot)) == "zf_oneshot");
  CHECK_THROWS(algorithm_from_name("simulated_annealing"));
}

TEST_CASE("sweep axis bookkeeping for both kinds") {
  SweepAxis g;
  g.kind = SweepAxis::Kind::GammaDb;
  g.gamma_db = {0.0, 2.5, 10.0};
  CHECK(g.size() == 3);
  CHECK(g.value_at(1) == 2.5);
  CHECK(g.label_at(1) == "2.5");
  CHECK(g.label_at(2) == "10");

  SweepAxis u;
  u.kind = SweepAxis::Kind::Users;
  u.users = {{2, 3}, {4, 1}};
  CHECK(u.size() == 2);
  CHECK(u.value_at(0) == 2003.0);
  CHECK(u.value_at(1) == 4001.0);
  CHECK(u.label_at(0) == "2x3");
  CHECK(u.label_at(1) == "4x1");
  CHECK(u.bits_at(0) != u.bits_at(1));
}

TEST_CASE("stock scenario wiring") {
  Scenario sc = Scenario::reference(4, 2, 2, {1.0, 3.0}, 5, 77);
  CHECK(sc.correlation_mode == CorrelationMode::Iid);
  CHECK(sc.algorithms.size() == 4);
  CHECK(sc.trials == 5);
  CHECK(sc.master_seed == 77);
  CHECK(sc.sweep.size() == 2);
  CHECK(sc.base.n_t == 4);
}

TEST_CASE("per-sweep-point parameters: target sweep") {
  Scenario sc = Scenario::reference(4, 2, 2, {0.0, 6.0}, 1, 1);
  SystemParams p0 = sc.params_at(0);
  SystemParams p1 = sc.params_at(1);
  CHECK(p0.gamma_d.size() == 2);
  CHECK(rel_err(p0.gamma_d[0], 1.0) < 1e-15);
  CHECK(rel_err(p1.gamma_u[1], db_to_linear(6.0)) < 1e-15);
  // Divergence cap is re-derived from the configured noise floors.
  CHECK(rel_err(p0.divergence_cap, 1e12 * p0.max_noise()) < 1e-12);
}

TEST_CASE("per-sweep-point parameters: user-count sweep") {
  Scenario sc = Scenario::reference(6, 2, 2, {4.0}, 1, 1);
  sc.gamma_db = 4.0;
  sc.sweep.kind = SweepAxis::Kind::Users;
  sc.sweep.gamma_db.clear();
  sc.sweep.users = {{3, 1}, {1, 4}};
  double noise = sc.base.sigma_d_sq[0];
  SystemParams p = sc.params_at(0);
  CHECK(p.k == 3);
  CHECK(p.l == 1);
  CHECK(p.sigma_d_sq.size() == 3);
  CHECK(p.sigma_d_sq[2] == noise);
  CHECK(p.gamma_d.size() == 3);
  CHECK(rel_err(p.gamma_d[0], db_to_linear(4.0)) < 1e-15);
  SystemParams q = sc.params_at(1);
  CHECK(q.k == 1);
  CHECK(q.l == 4);
  CHECK(q.gamma_u.size() == 4);
}

TEST_CASE("white-mode correlation comes from the estimator-error filter") {
  Scenario sc = Scenario::reference(3, 1, 1, {3.0}, 1, 1);
  sc.sigma_h0_sq_db = -10.0;
  SiCorrelation corr = sc.correlation_at(0);
  REQUIRE(corr.iid_variance.has_value());
  const SystemParams p = sc.params_at(0);
  double c = db_to_linear(-10.0);
  double s = p.sigma_z_sq / p.train_energy;
  CHECK(rel_err(*corr.iid_variance, c - c * c / (c + s)) < 1e-12);
}

TEST_CASE("trials are bitwise reproducible and distinct across indices") {
  Scenario sc = Scenario::reference(4, 2, 2, {3.0}, 3, 42);
  sc.algorithms = {Algorithm::Ao};
  auto a = run_trial(sc, 0, 1);
  auto b = run_trial(sc, 0, 1);
  REQUIRE(a.size() == 1);
  CHECK(a[0].feasible == b[0].feasible);
  CHECK(a[0].total_power == b[0].total_power);
  CHECK(a[0].max_adc_power == b[0].max_adc_power);
  auto c = run_trial(sc, 0, 2);
  CHECK(a[0].total_power != c[0].total_power);  // different channel draw
}

TEST_CASE("refined solve never loses to its own first iteration") {
  Scenario sc = Scenario::reference(4, 2, 2, {5.0}, 4, 9);
  sc.algorithms = {Algorithm::Ao, Algorithm::ZfOneshot};
  for (int t = 0; t < 4; ++t) {
    auto res = run_trial(sc, 0, t);
    REQUIRE(res.size() == 2);
    CHECK(res[0].feasible == res[1].feasible);  // both gated by the same first solve
    if (res[0].feasible) CHECK(res[0].total_power <= res[1].total_power * (1.0 + 1e-12));
  }
}

TEST_CASE("half-duplex trial reproduces the split designs") {
  Scenario sc = Scenario::reference(4, 2, 2, {3.0}, 1, 11);
  sc.algorithms = {Algorithm::Hd};
  auto res = run_trial(sc, 0, 0);
  REQUIRE(res.size() == 1);
  REQUIRE(res[0].feasible);

  SystemParams params = sc.params_at(0);
  SiCorrelation corr = sc.correlation_at(0);
  uint64_t seed = rng::derive(sc.master_seed, "trial", sc.sweep.bits_at(0), 0);
  ChannelRealization ch = sample_realization(params, seed);
  Eigen::VectorXd gd(params.k), gu(params.l);
  for (int i = 0; i < params.k; ++i) gd[i] = hd_target(params.gamma_d[i]);
  for (int j = 0; j < params.l; ++j) gu[j] = hd_target(params.gamma_u[j]);
  DlBeamforming dl = solve_hd_dl(ch.h, gd, params.sigma_d_sq, params);
  UlPowerControl ul = solve_hd_ul(ch.g, gu, params.sigma_z_sq, false, params);
  REQUIRE(solved(dl.status));
  REQUIRE(solved(ul.status));
  double total = ul.p.sum();
  for (const auto& wk : dl.w) total += wk.squaredNorm();
  CHECK(rel_err(res[0].total_power, total) < 1e-14);

  TransceiverSolution listen;
  listen.w.assign(params.k, Eigen::VectorXcd::Zero(params.n_t));
  listen.v = ul.v;
  listen.p_u = ul.p;
  CHECK(rel_err(res[0].max_adc_power, adc_power(listen, ch, corr, params).maxCoeff()) < 1e-14);
}

TEST_CASE("aggregation follows the mutual-feasibility rule") {
  Scenario sc = Scenario::reference(4, 2, 2, {3.0}, 3, 21);
  sc.algorithms = {Algorithm::Ao, Algorithm::Hd};
  auto rows = run_montecarlo(sc, 1);
  REQUIRE(rows.size() == 2);

  // Recompute by hand from the per-trial results.
  int mutual = 0;
  std::vector<int> feas(2, 0);
  std::vector<double> psum(2, 0.0), asum(2, 0.0);
  for (int t = 0; t < sc.trials; ++t) {
    auto cell = run_trial(sc, 0, t);
    bool all = true;
    for (int a = 0; a < 2; ++a) {
      if (cell[a].feasible) ++feas[a];
      else all = false;
    }
    if (!all) continue;
    ++mutual;
    for (int a = 0; a < 2; ++a) {
      psum[a] += cell[a].total_power;
      asum[a] += cell[a].max_adc_power;
    }
  }
  REQUIRE(mutual > 0);
  // Rows are sorted by algorithm name within the sweep point: ao, then hd.
  CHECK(rows[0].algorithm == Algorithm::Ao);
  CHECK(rows[1].algorithm == Algorithm::Hd);
  for (int a = 0; a < 2; ++a) {
    CHECK(rows[a].trials == 3);
    CHECK(rel_err(rows[a].feasibility_rate, static_cast<double>(feas[a]) / 3.0) < 1e-15);
    CHECK(rel_err(rows[a].mean_sum_power_dbm, linear_to_db(psum[a] / mutual)) < 1e-12);
    CHECK(rel_err(rows[a].mean_adc_power_dbm, linear_to_db(asum[a] / mutual)) < 1e-12);
  }
}

TEST_CASE("rows sort by sweep value then algorithm name") {
  Scenario sc = Scenario::reference(4, 2, 2, {6.0, 1.0}, 1, 3);
  sc.algorithms = {Algorithm::Hd, Algorithm::Ao};
  auto rows = run_montecarlo(sc, 1);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].sweep_value == 1.0);
  CHECK(rows[0].algorithm == Algorithm::Ao);
  CHECK(rows[1].sweep_value == 1.0);
  CHECK(rows[1].algorithm == Algorithm::Hd);
  CHECK(rows[2].sweep_value == 6.0);
  CHECK(rows[3].sweep_value == 6.0);
}

TEST_CASE("worker count does not change the aggregate bytes") {
  Scenario sc = Scenario::reference(4, 2, 2, {2.0, 5.0}, 2, 13);
  sc.algorithms = {Algorithm::Ao, Algorithm::Hd};
  std::string one = format_csv(run_montecarlo(sc, 1));
  std::string two = format_csv(run_montecarlo(sc, 2));
  CHECK(one == two);
}

TEST_CASE("aggregate CSV format") {
  const std::string header =
      "sweep,algorithm,feasibility_rate,mean_sum_power_dbm,mean_adc_power_dbm,trials\n";
  CHECK(format_csv({}) == header);

  AggregateRow row;
  row.sweep_label = "2.5";
  row.sweep_value = 2.5;
  row.algorithm = Algorithm::Bisection;
  row.feasibility_rate = 0.9375;
  row.mean_sum_power_dbm = -3.217894561;
  row.mean_adc_power_dbm = -41.25;
  row.trials = 16;
  std::string text = format_csv({row});
  std::stringstream ss(text);
  std::string line;
  REQUIRE(std::getline(ss, line));
  CHECK(line + "\n" == header);
  REQUIRE(std::getline(ss, line));
  auto fields = split_csv_line(line);
  REQUIRE(fields.size() == 6);
  CHECK(fields[0] == "2.5");
  CHECK(fields[1] == "bisection");
  CHECK(rel_err(std::stod(fields[2]), 0.9375) < 1e-6);
  CHECK(rel_err(std::stod(fields[3]), -3.217894561) < 1e-5);
  CHECK(rel_err(std::stod(fields[4]), -41.25) < 1e-6);
  CHECK(fields[5] == "16");
  CHECK(!std::getline(ss, line));

  AggregateRow empty = row;
  empty.mean_sum_power_dbm = std::nan("");
  empty.mean_adc_power_dbm = std::nan("");
  std::string nan_text = format_csv({empty});
  CHECK(nan_text.find("nan") != std::string::npos);
}

TEST_CASE("CSV writer emits LF-only bytes") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "fdtrx_emit_test.csv";
  emit_csv({}, path.string());
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() ==
        "sweep,algorithm,feasibility_rate,mean_sum_power_dbm,mean_adc_power_dbm,trials\n");
  fs::remove(path);
  CHECK_THROWS(emit_csv({}, (fs::temp_directory_path() / "no_such_dir" / "x.csv").string()));
}

TEST_CASE("scenario JSON: defaults") {
  Scenario sc = scenario_from_json("{}");
  CHECK(sc.base.n_t == 10);
  CHECK(sc.base.k == 4);
  CHECK(sc.base.l == 4);
  CHECK(rel_err(sc.base.sigma_z_sq, db_to_linear(-85.0)) < 1e-15);
  CHECK(sc.base.sigma_d_sq.size() == 4);
  CHECK(rel_err(sc.base.beta1, 1e-3) < 1e-12);
  CHECK(rel_err(sc.base.delta1, 1e-5) < 1e-12);
  CHECK(rel_err(sc.base.delta2, 1e-2) < 1e-12);
  CHECK(rel_err(sc.base.p_max, 1e4) < 1e-12);
  CHECK(!sc.base.gamma_adc.has_value());
  CHECK(!sc.divergence_cap_overridden);
  CHECK(sc.gamma_db == 5.0);
  CHECK(sc.sweep.kind == SweepAxis::Kind::GammaDb);
  REQUIRE(sc.sweep.gamma_db.size() == 1);
  CHECK(sc.sweep.gamma_db[0] == 5.0);
  CHECK(sc.trials == 1);
  CHECK(sc.master_seed == 1);
  CHECK(sc.algorithms.size() == 4);
  CHECK(sc.correlation_mode == CorrelationMode::Structured);
  CHECK(sc.sigma_h0_sq_db == -10.0);
}

TEST_CASE("scenario JSON: full key coverage") {
  const char* text = R"({
    "n_t": 6, "k": 2, "l": 3,
    "sigma_z_sq_dbm": -80.0, "sigma_d_sq_dbm": -82.0,
    "beta1_db": -25.0, "beta2_db": -28.0, "delta1_db": -45.0, "delta2_db": -18.0,
    "pathloss_bs_mu_db": -70.0, "pathloss_umu_dmu_db": -75.0, "pathloss_si_db": -12.0,
    "crosstalk_base_db": -20.0, "crosstalk_step_db": -5.0,
    "antenna_corr": 0.8, "train_energy": 0.5,
    "p_max_dbm": 30.0,
    "tol_bisect": 1e-4, "tol_fp": 1e-10, "tol_ao": 1e-5, "tol_subgrad": 1e-2,
    "max_iter_fp": 1000, "max_iter_ao": 20, "max_iter_subgrad": 50,
    "adc_cap_db": -40.0,
    "divergence_cap": 123.0,
    "gamma_db": 4.0,
    "sweep": {"type": "gamma_db", "values": [1.0, 4.0]},
    "trials": 7, "master_seed": 99,
    "algorithms": ["ao", "bisection"],
    "correlation_mode": "iid",
    "sigma_h0_sq_db": -20.0
  })";
  Scenario sc = scenario_from_json(text);
  CHECK(sc.base.n_t == 6);
  CHECK(sc.base.k == 2);
  CHECK(sc.base.l == 3);
  CHECK(rel_err(sc.base.sigma_z_sq, db_to_linear(-80.0)) < 1e-15);
  CHECK(rel_err(sc.base.sigma_d_sq[1], db_to_linear(-82.0)) < 1e-15);
  CHECK(rel_err(sc.base.beta1, db_to_linear(-25.0)) < 1e-15);
  CHECK(rel_err(sc.base.beta2, db_to_linear(-28.0)) < 1e-15);
  CHECK(rel_err(sc.base.delta1, db_to_linear(-45.0)) < 1e-15);
  CHECK(rel_err(sc.base.delta2, db_to_linear(-18.0)) < 1e-15);
  CHECK(sc.base.pathloss_bs_mu_db == -70.0);
  CHECK(sc.base.pathloss_umu_dmu_db == -75.0);
  CHECK(sc.base.pathloss_si_db == -12.0);
  CHECK(sc.base.crosstalk_base_db == -20.0);
  CHECK(sc.base.crosstalk_step_db == -5.0);
  CHECK(sc.base.antenna_corr == 0.8);
  CHECK(sc.base.train_energy == 0.5);
  CHECK(rel_err(sc.base.p_max, 1e3) < 1e-15);
  CHECK(sc.base.tol_bisect == 1e-4);
  CHECK(sc.base.tol_fp == 1e-10);
  CHECK(sc.base.tol_ao == 1e-5);
  CHECK(sc.base.tol_subgrad == 1e-2);
  CHECK(sc.base.max_iter_fp == 1000);
  CHECK(sc.base.max_iter_ao == 20);
  CHECK(sc.base.max_iter_subgrad == 50);
  REQUIRE(sc.base.gamma_adc.has_value());
  CHECK(rel_err(*sc.base.gamma_adc, 1e-4) < 1e-15);
  CHECK(sc.divergence_cap_overridden);
  CHECK(sc.base.divergence_cap == 123.0);
  CHECK(sc.params_at(0).divergence_cap == 123.0);  // override survives the sweep expansion
  CHECK(sc.gamma_db == 4.0);
  REQUIRE(sc.sweep.gamma_db.size() == 2);
  CHECK(sc.trials == 7);
  CHECK(sc.master_seed == 99);
  REQUIRE(sc.algorithms.size() == 2);
  CHECK(sc.algorithms[0] == Algorithm::Ao);
  CHECK(sc.algorithms[1] == Algorithm::Bisection);
  CHECK(sc.correlation_mode == CorrelationMode::Iid);
  CHECK(sc.sigma_h0_sq_db == -20.0);
}

TEST_CASE("scenario JSON: cap key alias and precedence") {
  Scenario alias = scenario_from_json(R"({"gamma_adc_dbm": -40.0})");
  REQUIRE(alias.base.gamma_adc.has_value());
  CHECK(rel_err(*alias.base.gamma_adc, 1e-4) < 1e-15);
  Scenario both = scenario_from_json(R"({"adc_cap_db": -30.0, "gamma_adc_dbm": -40.0})");
  CHECK(rel_err(*both.base.gamma_adc, 1e-3) < 1e-15);
}

TEST_CASE("scenario JSON: user sweeps in both spellings") {
  Scenario sc = scenario_from_json(
      R"({"n_t": 6, "sweep": {"type": "users", "values": ["2x3", [4, 1]]}})");
  CHECK(sc.sweep.kind == SweepAxis::Kind::Users);
  REQUIRE(sc.sweep.users.size() == 2);
  CHECK(sc.sweep.users[0] == std::pair<int, int>(2, 3));
  CHECK(sc.sweep.users[1] == std::pair<int, int>(4, 1));
  SystemParams p = sc.params_at(1);
  CHECK(p.k == 4);
  CHECK(p.l == 1);
}

TEST_CASE("scenario JSON: malformed input is rejected with context") {
  try {
    scenario_from_json("this is not json");
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).rfind("scenario JSON parse error: ", 0) == 0);
  }
  CHECK_THROWS_AS(scenario_from_json(R"({"sweep": {"type": "bandwidth", "values": [1]}})"),
                  std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json(R"({"correlation_mode": "pink"})"), std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json(R"({"algorithms": ["gradient_descent"]})"),
                  std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json(R"({"trials": 0})"), std::runtime_error);
  CHECK_THROWS_AS(scenario_from_json(R"({"n_t": -1})"), std::invalid_argument);
  CHECK_THROWS_AS(scenario_from_json_file("/no/such/scenario.json"), std::runtime_error);
}

TEST_CASE("ADC cap only removes designs, never adds them") {
  Scenario open = Scenario::reference(4, 2, 2, {4.0}, 4, 31);
  open.algorithms = {Algorithm::Ao};
  Scenario capped = open;
  capped.base.gamma_adc = db_to_linear(-40.0);

  int open_feasible = 0, capped_feasible = 0;
  for (int t = 0; t < 4; ++t) {
    auto a = run_trial(open, 0, t);
    auto b = run_trial(capped, 0, t);
    open_feasible += a[0].feasible;
    capped_feasible += b[0].feasible;
    if (b[0].feasible) {
      CHECK(b[0].max_adc_power <= *capped.base.gamma_adc * (1.0 + 1e-4));
      if (a[0].feasible) CHECK(b[0].total_power >= a[0].total_power * (1.0 - 1e-9));
    }
  }
  CHECK(capped_feasible <= open_feasible);
}
