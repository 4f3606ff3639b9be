#pragma once

// Reference slot selection written as a plain enumeration of the window, and
// a driver that compares it with the library on every small slot map.

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <vector>

#include "vanetmac/stdma.hpp"

namespace oracle {

using namespace vanetmac;

struct Pick {
  SlotIndex offset = 0;
  std::optional<VehicleId> stolen_from;
  bool operator==(const Pick&) const = default;
};

// Consumes the generator in the same order as the library: one candidate
// draw, then one coin only when two free slots are equally close.
inline Pick reference_select(const SelectionInterval& si, const SlotMap& map, const RoadPoint& self, Nanos now,
                             Rng& rng) {
  std::vector<SlotIndex> offsets;
  for (SlotIndex o = si.first_offset(); o <= si.last_offset(); ++o) offsets.push_back(o);
  std::uniform_int_distribution<SlotIndex> pick(offsets.front(), offsets.back());
  const SlotIndex c = pick(rng);

  std::vector<SlotIndex> free;
  for (auto o : offsets) {
    const auto slot = ((si.center + o) % si.n_slots + si.n_slots) % si.n_slots;
    const auto& e = map.at(slot);
    const bool taken = e.own || (e.owner != kNoOwner && now - e.heard <= Nanos{1'000'000'000});
    if (!taken) free.push_back(o);
  }
  if (!free.empty()) {
    SlotIndex best = std::abs(free.front() - c);
    for (auto o : free) best = std::min(best, std::abs(o - c));
    std::vector<SlotIndex> nearest;
    for (auto o : free)
      if (std::abs(o - c) == best) nearest.push_back(o);
    if (nearest.size() == 1) return {nearest.front(), std::nullopt};
    std::bernoulli_distribution coin(0.5);
    return {coin(rng) ? nearest.back() : nearest.front(), std::nullopt};
  }

  std::optional<Pick> victim;
  double far = -1.0;
  for (auto o : offsets) {
    const auto slot = ((si.center + o) % si.n_slots + si.n_slots) % si.n_slots;
    const auto& e = map.at(slot);
    if (e.own) continue;
    const double d = distance(e.owner_position, self);
    if (!victim || d > far || (d == far && e.owner < *victim->stolen_from)) {
      victim = Pick{o, e.owner};
      far = d;
    }
  }
  return victim ? *victim : Pick{c, std::nullopt};
}

struct Sweep {
  long instances = 0;
  long mismatches = 0;
};

// Every slot in the window is one of: free, own, or held by one of up to
// three other nodes heard either recently or more than a frame ago. Other
// slots of the frame stay free.
inline Sweep exhaustive(SlotIndex max_slots = 12, SlotIndex max_width = 4) {
  const Nanos frame{1'000'000'000};
  const Nanos now = frame * 5;
  const std::vector<RoadPoint> others{{400.0, 0.0}, {-400.0, 3.5}, {900.0, 7.0}};
  const RoadPoint self{0.0, 0.0};
  constexpr int kStates = 8;  // free, own, 3 nodes fresh, 3 nodes stale
  Sweep out;
  for (SlotIndex n = 1; n <= max_slots; ++n) {
    for (SlotIndex width = 1; width <= std::min(n, max_width); ++width) {
      for (SlotIndex center : {SlotIndex{0}, n / 2, n - 1}) {
        const SelectionInterval si{center, width, n};
        long combos = 1;
        for (SlotIndex i = 0; i < width; ++i) combos *= kStates;
        for (long code = 0; code < combos; ++code) {
          SlotMap map(n, frame);
          long rest = code;
          for (SlotIndex o = si.first_offset(); o <= si.last_offset(); ++o) {
            const int state = static_cast<int>(rest % kStates);
            rest /= kStates;
            const auto slot = si.slot_at_offset(o);
            if (state == 1) {
              map.mark_own(slot, 99, self, now - frame * 3);
            } else if (state >= 2) {
              const int who = (state - 2) % 3;
              const Nanos heard = state < 5 ? now - frame / 2 : now - frame - Nanos{1};
              map.record(slot, static_cast<VehicleId>(who + 1), others[static_cast<std::size_t>(who)], heard, self);
            }
          }
          for (std::uint64_t seed = 0; seed < 3; ++seed) {
            Rng a(seed * 7919 + static_cast<std::uint64_t>(code)), b = a;
            const auto got = select_nts(si, map, self, now, a);
            const auto want = reference_select(si, map, self, now, b);
            ++out.instances;
            if (got.offset != want.offset || got.stolen_from != want.stolen_from || got.slot != si.slot_at_offset(want.offset) ||
                a != b) {
              ++out.mismatches;
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace oracle
