#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>

namespace vanetmac {

/// Simulation clock unit. Every internal timestamp and duration is an integer
/// number of nanoseconds so that event ordering never depends on float drift.
using Nanos = std::chrono::nanoseconds;

inline constexpr Nanos kNever{std::numeric_limits<Nanos::rep>::max()};

constexpr Nanos from_us(double us) { return Nanos{static_cast<Nanos::rep>(std::llround(us * 1e3))}; }
constexpr Nanos from_ms(double ms) { return Nanos{static_cast<Nanos::rep>(std::llround(ms * 1e6))}; }
constexpr Nanos from_s(double s) { return Nanos{static_cast<Nanos::rep>(std::llround(s * 1e9))}; }

constexpr double to_us(Nanos t) { return static_cast<double>(t.count()) / 1e3; }
constexpr double to_ms(Nanos t) { return static_cast<double>(t.count()) / 1e6; }
constexpr double to_s(Nanos t) { return static_cast<double>(t.count()) / 1e9; }

/// Whole microseconds, rounded half away from zero. Display only.
inline std::int64_t display_us(Nanos t) { return std::llround(to_us(t)); }

}  // namespace vanetmac
