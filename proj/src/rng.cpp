#include "finsight/rng.hpp"

#include <cassert>
#include <numeric>

namespace finsight {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

uint64_t uniform_below(Rng& rng, uint64_t n) {
  assert(n > 0);
  // 2^64 mod n; values >= 2^64 - rem would bias the modulo and are redrawn.
  const uint64_t rem = (std::numeric_limits<uint64_t>::max() % n + 1) % n;
  uint64_t x = rng();
  if (rem != 0) {
    const uint64_t bound = std::numeric_limits<uint64_t>::max() - rem;
    while (x > bound) x = rng();
  }
  return x % n;
}

double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  shuffle(perm, rng);
  return perm;
}

}  // namespace finsight
