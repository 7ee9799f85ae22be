#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mepsim {

/// One named, independently seeded random stream.
///
/// Streams are derived from a root seed and a name, so that consuming one
/// stream (e.g. omission coins) never perturbs another (e.g. delays).
/// Output is fully specified by the standard engine plus the explicit
/// transformations below, hence identical on every platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [lo, hi], inclusive. Unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for the stream called `name` under `root_seed`.
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view name);

inline RngStream derive_stream(std::uint64_t root_seed, std::string_view name) {
  return RngStream(derive_seed(root_seed, name));
}

}  // namespace mepsim
