#pragma once

#include <cstdint>
#include <random>

namespace simlpe {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One mixing rule for every sub-stream (init, batches, per-sequence seeds, ...)
// so a single run seed fans out into independent deterministic generators.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

// Deterministic random source. All randomness in the project flows through
// this wrapper: the engine is std::mt19937_64, whose output sequence is fixed
// bit-exactly by the standard, and the value mappings below are implemented by
// hand because std::*_distribution results differ between standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) from the top 53 bits of the engine output.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform index in [0, n), n > 0. Multiply-shift reduction.
  size_t index(size_t n) {
    return static_cast<size_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace simlpe
