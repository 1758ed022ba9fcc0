// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fdtrx/harness.hpp"
#include "json.hpp"

namespace fdtrx {
namespace {

using nlohmann::json;

double get_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

int get_or(const json& j, const char* key, int fallback) {
  return j.contains(key) ? j.at(key).get<int>() : fallback;
}

SweepAxis parse_sweep(const json& j) {
  SweepAxis axis;
  if (!j.contains("sweep")) {
    axis.kind = SweepAxis::Kind::GammaDb;
    axis.gamma_db = {get_or(j, "gamma_db", 5.0)};
    return axis;
  }
  const json& sw = j.at("sweep");
  const std::string type = sw.at("type").get<std::string>();
  if (type == "gamma_db") {
    axis.kind = SweepAxis::Kind::GammaDb;
    for (const auto& v : sw.at("values")) axis.gamma_db.push_back(v.get<double>());
  } else if (type == "users") {
    axis.kind = SweepAxis::Kind::Users;
    for (const auto& v : sw.at("values")) {
      if (v.is_string()) {  // "KxL"
        const std::string s = v.get<std::string>();
        const auto x = s.find('x');
        if (x == std::string::npos) throw std::runtime_error("users sweep entry must be \"KxL\"");
        axis.users.emplace_back(std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1)));
      } else {
        if (!v.is_array() || v.size() != 2)
          throw std::runtime_error("users sweep entry must be [k, l] or \"KxL\"");
        axis.users.emplace_back(v[0].get<int>(), v[1].get<int>());
      }
    }
  } else {
    throw std::runtime_error("unknown sweep type: " + type);
  }
  return axis;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("scenario JSON parse error: ") + e.what());
  }

  Scenario sc;
  SystemParams& p = sc.base;
  p.n_t = get_or(j, "n_t", 10);
  p.k = get_or(j, "k", 4);
  p.l = get_or(j, "l", 4);
  p.sigma_z_sq = db_to_linear(get_or(j, "sigma_z_sq_dbm", -85.0));
  p.sigma_d_sq = Eigen::VectorXd::Constant(p.k, db_to_linear(get_or(j, "sigma_d_sq_dbm", -85.0)));
  p.beta1 = db_to_linear(get_or(j, "beta1_db", -30.0));
  p.beta2 = db_to_linear(get_or(j, "beta2_db", -30.0));
  p.delta1 = db_to_linear(get_or(j, "delta1_db", -50.0));
  p.delta2 = db_to_linear(get_or(j, "delta2_db", -20.0));
  p.pathloss_bs_mu_db = get_or(j, "pathloss_bs_mu_db", -80.0);
  p.pathloss_umu_dmu_db = get_or(j, "pathloss_umu_dmu_db", -83.0);
  p.pathloss_si_db = get_or(j, "pathloss_si_db", -10.0);
  p.crosstalk_base_db = get_or(j, "crosstalk_base_db", -24.0);
  p.crosstalk_step_db = get_or(j, "crosstalk_step_db", -6.0);
  p.antenna_corr = get_or(j, "antenna_corr", 0.9);
  p.train_energy = get_or(j, "train_energy", 1e-2);
  p.p_max = db_to_linear(get_or(j, "p_max_dbm", 40.0));
  p.tol_bisect = get_or(j, "tol_bisect", 1e-3);
  p.tol_fp = get_or(j, "tol_fp", 1e-11);
  p.tol_ao = get_or(j, "tol_ao", 1e-6);
  p.tol_subgrad = get_or(j, "tol_subgrad", 1e-3);
  p.max_iter_fp = get_or(j, "max_iter_fp", 50000);
  p.max_iter_ao = get_or(j, "max_iter_ao", 100);
  p.max_iter_subgrad = get_or(j, "max_iter_subgrad", 300);
  if (j.contains("adc_cap_db"))
    p.gamma_adc = db_to_linear(j.at("adc_cap_db").get<double>());
  else if (j.contains("gamma_adc_dbm"))
    p.gamma_adc = db_to_linear(j.at("gamma_adc_dbm").get<double>());
  if (j.contains("divergence_cap")) {
    p.divergence_cap = j.at("divergence_cap").get<double>();
    sc.divergence_cap_overridden = true;
  }

  sc.gamma_db = get_or(j, "gamma_db", 5.0);
  sc.sweep = parse_sweep(j);
  sc.trials = get_or(j, "trials", 1);
  sc.master_seed = j.contains("master_seed") ? j.at("master_seed").get<uint64_t>() : 1;

  if (j.contains("algorithms")) {
    sc.algorithms.clear();
    for (const auto& a : j.at("algorithms"))
      sc.algorithms.push_back(algorithm_from_name(a.get<std::string>()));
  } else {
    sc.algorithms = {Algorithm::Ao, Algorithm::ZfOneshot, Algorithm::Bisection, Algorithm::Hd};
  }

  const std::string mode =
      j.contains("correlation_mode") ? j.at("correlation_mode").get<std::string>() : "structured";
  if (mode == "structured") {
    sc.correlation_mode = CorrelationMode::Structured;
  } else if (mode == "iid") {
    sc.correlation_mode = CorrelationMode::Iid;
  } else {
    throw std::runtime_error("unknown correlation_mode: " + mode);
  }
  sc.sigma_h0_sq_db = get_or(j, "sigma_h0_sq_db", -10.0);

  // Targets are set per sweep point, but validate() needs sane lengths now.
  sc.base.set_uniform_targets(db_to_linear(sc.gamma_db));
  sc.validate();
  return sc;
}

Scenario scenario_from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return scenario_from_json(ss.str());
}

}  // namespace fdtrx
