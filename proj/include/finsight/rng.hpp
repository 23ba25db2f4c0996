#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace finsight {

// All randomized operations draw from mt19937_64 through the helpers below.
// std::uniform_int_distribution and std::shuffle are implementation-defined,
// so they never appear on a seeded path; these helpers depend only on the
// engine sequence and give bit-identical results on every toolchain.
using Rng = std::mt19937_64;

uint64_t splitmix64(uint64_t x);

// Independent seed for sub-stream `stream` of a run seeded with `base`.
uint64_t derive_seed(uint64_t base, uint64_t stream);

// Unbiased draw in [0, n), n >= 1. Modulo with rejection.
uint64_t uniform_below(Rng& rng, uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

// Fisher-Yates backed by uniform_below.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace finsight
