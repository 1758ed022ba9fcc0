// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fdtrx/system_params.hpp"

namespace fdtrx {

// One draw of every propagation channel in the system: BS-to-user downlink
// vectors, user-to-BS uplink vectors, and the uplink-user-to-downlink-user
// co-channel scalars.
struct ChannelRealization {
  std::vector<Eigen::VectorXcd> h;  // k vectors of length n_t
  std::vector<Eigen::VectorXcd> g;  // l vectors of length n_t
  Eigen::MatrixXcd f;               // l x k; f(j, i) couples uplink user j into downlink user i
  uint64_t seed = 0;
};

// Rayleigh-fading draw, deterministic in (params, seed). Every user and every
// cross-channel entry has its own derived substream, so adding users to a
// scenario never changes the channels of existing ones.
ChannelRealization sample_realization(const SystemParams& params, uint64_t seed);

}  // namespace fdtrx
