#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

// Deterministic hashing and sampling primitives. Everything downstream of a
// simulation seed flows through these, so they are fixed, portable integer
// and double arithmetic rather than library distributions.

namespace bgpm::detail {

inline uint64_t mix64(uint64_t x) {
  // splitmix64 finalizer
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline uint64_t fnv1a64(std::span<const uint8_t> bytes, uint64_t h = 0xcbf29ce484222325ULL) {
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64_str(std::string_view s, uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64({reinterpret_cast<const uint8_t*>(s.data()), s.size()}, h);
}

/// Keyed counter stream: cheap, stateless-seedable uniform u64 generator.
class MixStream {
public:
  explicit MixStream(uint64_t key) : state_(mix64(key ^ 0x9e3779b97f4a7c15ULL)) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in (0, 1): never returns 0 so logs are safe.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (fixed algorithm, portable results).
  double next_normal() {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Log-normal given the median and the log-space sigma.
  double next_lognormal(double median, double sigma) {
    return median * std::exp(sigma * next_normal());
  }

private:
  uint64_t state_;
};

}  // namespace bgpm::detail
