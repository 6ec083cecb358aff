#ifndef WIDELIN_RNG_HPP
#define WIDELIN_RNG_HPP

#include <cstdint>
#include <random>

#include "widelin/types.hpp"

namespace widelin {

// Seedable generator with deterministic substreams. Trial i of a sweep uses
// substream(master_seed, i), so results do not depend on how trials are
// scheduled across workers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(mix(master_seed) ^ mix(index + 0x9e3779b97f4a7c15ULL));
  }

  double gaussian() { return normal_(engine_); }

  RVec gaussian_vector(Index n) {
    RVec v(n);
    for (Index i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace widelin

#endif  // WIDELIN_RNG_HPP
