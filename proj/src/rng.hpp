#pragma once

#include <cstdint>

namespace direx {

// Counter-based PRNG. Every draw is a pure hash of (key, stream, counter),
// so independent streams can be evaluated in any order or concurrently and
// still reproduce bit-identically for a fixed seed.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t counter_hash(uint64_t key, uint64_t stream, uint64_t counter) {
  return mix64(mix64(mix64(key) ^ stream) ^ counter);
}

inline double u64_to_unit(uint64_t v) {
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

class CounterRng {
 public:
  CounterRng(uint64_t key, uint64_t stream) : key_(key), stream_(stream) {}

  uint64_t next_u64() { return counter_hash(key_, stream_, counter_++); }

  // uniform in [0, 1)
  double next_double() { return u64_to_unit(next_u64()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Stateless access for per-round draws: same (key, stream, counter) always
  // yields the same variate regardless of evaluation order.
  static double at(uint64_t key, uint64_t stream, uint64_t counter) {
    return u64_to_unit(counter_hash(key, stream, counter));
  }

 private:
  uint64_t key_;
  uint64_t stream_;
  uint64_t counter_ = 0;
};

}  // namespace direx
