#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vanetmac {

using Rng = std::mt19937_64;

/// Independent generator for one named purpose ("arrivals", "backoff", ...)
/// derived from a run's master seed. `index` separates per-lane streams.
inline Rng make_stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace vanetmac
