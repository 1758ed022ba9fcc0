// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/channel.hpp"

#include "fdtrx/rng.hpp"

namespace fdtrx {

ChannelRealization sample_realization(const SystemParams& params, uint64_t seed) {
  const double var_bs = db_to_linear(params.pathloss_bs_mu_db);
  const double var_cc = db_to_linear(params.pathloss_umu_dmu_db);

  ChannelRealization ch;
  ch.seed = seed;
  ch.h.reserve(params.k);
  for (int i = 0; i < params.k; ++i) {
    rng::Stream s(rng::derive(seed, "dl", static_cast<uint64_t>(i)));
    Eigen::VectorXcd hi(params.n_t);
    for (int n = 0; n < params.n_t; ++n) hi[n] = s.cgauss(var_bs);
    ch.h.push_back(std::move(hi));
  }
  ch.g.reserve(params.l);
  for (int j = 0; j < params.l; ++j) {
    rng::Stream s(rng::derive(seed, "ul", static_cast<uint64_t>(j)));
    Eigen::VectorXcd gj(params.n_t);
    for (int n = 0; n < params.n_t; ++n) gj[n] = s.cgauss(var_bs);
    ch.g.push_back(std::move(gj));
  }
  ch.f.resize(params.l, params.k);
  for (int j = 0; j < params.l; ++j)
    for (int i = 0; i < params.k; ++i) {
      rng::Stream s(rng::derive(seed, "xu", static_cast<uint64_t>(j), static_cast<uint64_t>(i)));
      ch.f(j, i) = s.cgauss(var_cc);
    }
  return ch;
}

}  // namespace fdtrx
