// SPDX-License-Identifier: Apache-2.0
//
// fdtrx — command-line front end for the full-duplex transceiver design
// library: solve one seeded instance, or run a Monte-Carlo sweep to CSV.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fdtrx/ao.hpp"
#include "fdtrx/bisection.hpp"
#include "fdtrx/harness.hpp"
#include "fdtrx/metrics.hpp"
#include "fdtrx/rng.hpp"

namespace {

using nlohmann::json;

json complex_vector_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

json real_vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

fdtrx::SweepAxis parse_sweep_override(const std::string& spec) {
  fdtrx::SweepAxis axis;
  std::string item;
  std::stringstream ss(spec);
  bool users = spec.find('x') != std::string::npos;
  axis.kind = users ? fdtrx::SweepAxis::Kind::Users : fdtrx::SweepAxis::Kind::GammaDb;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (users) {
      const auto x = item.find('x');
      if (x == std::string::npos) throw std::runtime_error("--sweep entries must all be KxL");
      axis.users.emplace_back(std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1)));
    } else {
      axis.gamma_db.push_back(std::stod(item));
    }
  }
  if (axis.size() == 0) throw std::runtime_error("--sweep override is empty");
  return axis;
}

// Exit codes: 0 solved, 2 infeasible, 1 error.
int run_solve(const std::string& config_path, uint64_t seed, bool seed_given,
              const std::string& algorithm, size_t sweep_index, const std::string& out_path) {
  fdtrx::Scenario scenario = fdtrx::scenario_from_json_file(config_path);
  if (sweep_index >= scenario.sweep.size()) throw std::runtime_error("--sweep-index out of range");
  const fdtrx::Algorithm alg = fdtrx::algorithm_from_name(algorithm);
  const fdtrx::SystemParams params = scenario.params_at(sweep_index);
  const fdtrx::SiCorrelation corr = scenario.correlation_at(sweep_index);
  const uint64_t realization_seed =
      seed_given ? seed
                 : fdtrx::rng::derive(scenario.master_seed, "trial",
                                      scenario.sweep.bits_at(sweep_index), 0);
  const fdtrx::ChannelRealization ch = fdtrx::sample_realization(params, realization_seed);

  json out;
  out["algorithm"] = algorithm;
  out["seed"] = realization_seed;
  out["sweep"] = scenario.sweep.label_at(sweep_index);

  bool feasible = false;
  fdtrx::TransceiverSolution sol;
  int iterations = 0;

  if (alg == fdtrx::Algorithm::Ao || alg == fdtrx::Algorithm::ZfOneshot) {
    fdtrx::SystemParams p = params;
    if (alg == fdtrx::Algorithm::ZfOneshot) p.max_iter_ao = 1;
    const fdtrx::AlternatingResult r = fdtrx::solve_alternating(ch, corr, p);
    out["status"] = fdtrx::to_string(r.status);
    feasible = fdtrx::solved(r.status);
    iterations = r.iterations;
    if (feasible) sol = r.sol;
  } else if (alg == fdtrx::Algorithm::Bisection) {
    const bool worst_case = scenario.correlation_mode == fdtrx::CorrelationMode::Structured;
    const fdtrx::BisectionResult r = fdtrx::solve_bisection(ch, corr, params, worst_case);
    out["status"] = fdtrx::to_string(r.status);
    feasible = fdtrx::solved(r.status);
    iterations = r.iterations;
    if (feasible) {
      sol = r.sol;
      out["eta_star_mw"] = r.eta_star;
    }
  } else {  // half-duplex baseline pair
    Eigen::VectorXd gd(params.k), gu(params.l);
    for (int i = 0; i < params.k; ++i) gd[i] = fdtrx::hd_target(params.gamma_d[i]);
    for (int j = 0; j < params.l; ++j) gu[j] = fdtrx::hd_target(params.gamma_u[j]);
    const fdtrx::DlBeamforming dl = fdtrx::solve_hd_dl(ch.h, gd, params.sigma_d_sq, params);
    const fdtrx::UlPowerControl ul =
        fdtrx::solve_hd_ul(ch.g, gu, params.sigma_z_sq, /*impaired=*/false, params);
    feasible = fdtrx::solved(dl.status) && fdtrx::solved(ul.status);
    out["status"] = feasible ? "solved"
                             : (fdtrx::solved(dl.status) ? fdtrx::to_string(ul.status)
                                                         : fdtrx::to_string(dl.status));
    iterations = dl.iterations + ul.iterations;
    if (feasible) {
      sol.w = dl.w;
      sol.v = ul.v;
      sol.p_u = ul.p;
    }
  }

  out["feasible"] = feasible;
  out["iterations"] = iterations;
  if (feasible) {
    out["total_power_mw"] = sol.total_power();
    out["total_power_dbm"] = fdtrx::linear_to_db(sol.total_power());
    out["dl_power_mw"] = sol.dl_power();
    out["ul_power_mw"] = sol.ul_power();
    json w = json::array(), v = json::array();
    for (const auto& wk : sol.w) w.push_back(complex_vector_json(wk));
    for (const auto& vl : sol.v) v.push_back(complex_vector_json(vl));
    out["w"] = w;
    out["v"] = v;
    out["p_u_mw"] = real_vector_json(sol.p_u);
    if (alg != fdtrx::Algorithm::Hd) {  // metrics of the joint problem
      json dl_sinrs = json::array(), ul_sinrs = json::array();
      for (int i = 0; i < params.k; ++i) dl_sinrs.push_back(fdtrx::dl_sinr(i, sol, ch, params));
      for (int j = 0; j < params.l; ++j)
        ul_sinrs.push_back(fdtrx::ul_sinr(j, sol, ch, corr, params));
      out["dl_sinr"] = dl_sinrs;
      out["ul_sinr"] = ul_sinrs;
      const Eigen::VectorXd adc = fdtrx::adc_power(sol, ch, corr, params);
      out["max_adc_power_mw"] = adc.maxCoeff();
      out["max_adc_power_dbm"] = fdtrx::linear_to_db(adc.maxCoeff());
    }
    out["dl_sinr_target"] = real_vector_json(params.gamma_d);
    out["ul_sinr_target"] = real_vector_json(params.gamma_u);
  }

  write_text(out_path, out.dump(2) + "\n");
  return feasible ? 0 : 2;
}

int run_montecarlo_cmd(const std::string& config_path, int trials_override,
                       const std::string& sweep_override, int threads,
                       const std::string& out_path) {
  fdtrx::Scenario scenario = fdtrx::scenario_from_json_file(config_path);
  if (trials_override > 0) scenario.trials = trials_override;
  if (!sweep_override.empty()) scenario.sweep = parse_sweep_override(sweep_override);
  scenario.validate();
  const auto rows = fdtrx::run_montecarlo(scenario, threads);
  write_text(out_path, fdtrx::format_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex multi-user transceiver design: QoS-constrained power minimization"};
  app.require_subcommand(1);

  std::string config_path, out_path = "-", algorithm = "ao", sweep_override;
  uint64_t seed = 0;
  bool seed_given = false;
  size_t sweep_index = 0;
  int trials = 0, threads = 0;

  CLI::App* solve = app.add_subcommand("solve", "Solve one seeded instance, emit JSON");
  solve->add_option("--config", config_path, "Scenario JSON file")->required();
  solve->add_option("--seed", seed, "Channel realization seed")->each([&](const std::string&) {
    seed_given = true;
  });
  solve->add_option("--algorithm", algorithm, "ao | zf_oneshot | bisection | hd");
  solve->add_option("--sweep-index", sweep_index, "Which sweep point to instantiate (default 0)");
  solve->add_option("--out", out_path, "Output JSON path, or - for stdout");

  CLI::App* mc = app.add_subcommand("montecarlo", "Run the full sweep, emit aggregate CSV");
  mc->add_option("--config", config_path, "Scenario JSON file")->required();
  mc->add_option("--trials", trials, "Override trial count");
  mc->add_option("--sweep", sweep_override, "Override sweep values: \"1,2,3\" or \"2x2,4x4\"");
  mc->add_option("--threads", threads, "Worker thread cap (also FDTRX_THREADS)");
  mc->add_option("--out", out_path, "Output CSV path, or - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "fdtrx: " << e.what() << "\n";
    return 1;
  }

  try {
    if (solve->parsed())
      return run_solve(config_path, seed, seed_given, algorithm, sweep_index, out_path);
    return run_montecarlo_cmd(config_path, trials, sweep_override, threads, out_path);
  } catch (const std::exception& e) {
    std::cerr << "fdtrx: " << e.what() << "\n";
    return 1;
  }
}
