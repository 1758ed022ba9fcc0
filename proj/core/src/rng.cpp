// SPDX-License-Identifier: Apache-2.0
#include "fdtrx/rng.hpp"

#include <cmath>

namespace fdtrx::rng {
namespace {

// splitmix64 finalizer: full-avalanche mix of one 64-bit word.
uint64_t mix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t fold(uint64_t state, uint64_t word) { return mix(state ^ mix(word)); }

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t derive(uint64_t seed, std::string_view tag) { return fold(seed, fnv1a(tag)); }

uint64_t derive(uint64_t seed, std::string_view tag, uint64_t a) {
  return fold(derive(seed, tag), a);
}

uint64_t derive(uint64_t seed, std::string_view tag, uint64_t a, uint64_t b) {
  return fold(fold(derive(seed, tag), a), b);
}

double Stream::uniform01() {
  return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Stream::exponential() {
  // -log(1-u) with u in [0,1) keeps the argument strictly positive.
  return -std::log1p(-uniform01());
}

std::complex<double> Stream::cgauss(double variance) {
  // Polar form: |z|^2 ~ Exp(mean = variance), phase uniform.
  const double r = std::sqrt(variance * exponential());
  const double phi = 6.283185307179586476925286766559 * uniform01();
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace fdtrx::rng
