#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace phoenix {

/// Seeded mt19937_64 with platform-independent integer draws (the standard
/// distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound); bound must be positive.
  std::size_t below(std::size_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace phoenix
