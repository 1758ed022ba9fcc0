// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string_view>

namespace fdtrx::rng {

// Fold a label and up to two integer coordinates into a fresh 64-bit seed.
// Used to give every entity (user channel, trial, ...) its own substream so
// growing one axis of an experiment never perturbs draws on another.
uint64_t derive(uint64_t seed, std::string_view tag);
uint64_t derive(uint64_t seed, std::string_view tag, uint64_t a);
uint64_t derive(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b);

// Seedable generator with cross-platform-stable output. mt19937_64 has a
// standard-mandated integer sequence; the floating-point and complex-Gaussian
// transforms are hand-rolled because the standard library distributions are
// not bit-stable across implementations.
class Stream {
 public:
  explicit Stream(uint64_t seed) : eng_(seed) {}

  uint64_t bits() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  // Exponential with mean 1.
  double exponential();

  // Circularly symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> cgauss(double variance);

 private:
  std::mt19937_64 eng_;
};

}  // namespace fdtrx::rng
