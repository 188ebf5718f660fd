#pragma once

#include <cstdint>
#include <random>

namespace pcqp {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used to derive independent
/// seeds from (base seed, purpose tag) pairs.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for a named sub-stream; changing one tag never perturbs another.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept;

/// Standard normal deviates from std::mt19937_64 through the Box–Muller
/// transform. std::normal_distribution is not used because its output is
/// implementation-defined; this stream is reproducible across standard
/// libraries (up to libm's log/sqrt/cos).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double uniform_open_closed();  // (0, 1]

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pcqp
