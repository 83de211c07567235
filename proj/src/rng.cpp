#include "phoenix/rng.hpp"

#include "phoenix/error.hpp"

namespace phoenix {

std::size_t Rng::below(std::size_t bound) {
  if (bound == 0) throw ValidationError("empty range");
  const std::uint64_t b = bound;
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % b + 1) % b;
  std::uint64_t x = next();
  while (x > limit) x = next();
  return static_cast<std::size_t>(x % b);
}

}  // namespace phoenix
