#include "expertbayes/random.hpp"

#include "expertbayes/error.hpp"

namespace expertbayes {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::InvalidArgument, "bound must be positive");
  const std::uint64_t floor = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= floor) return x % bound;
  }
}

}  // namespace expertbayes
