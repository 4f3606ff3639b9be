#pragma once

#include <cstdint>
#include <ostream>

#include "vanetmac/config.hpp"
#include "vanetmac/metrics.hpp"
#include "vanetmac/time.hpp"

namespace vanetmac {

enum class EventKind {
  VehicleArrival,
  HeartbeatGenerated,
  AccessTimer,  // AIFS or backoff expiry
  TransmissionEnd,
  NetworkEntry,
  SlotReached,
  MobilityTick,
};

struct Event {
  Nanos time{0};
  std::uint64_t seq = 0;
  EventKind kind = EventKind::MobilityTick;
  VehicleId node = 0;
  std::uint64_t aux = 0;  // lane, timer token, transmission id or reservation index
};

/// Optional debugging traces. Null streams are skipped.
struct RunOptions {
  std::ostream* vehicle_trace = nullptr;  // time_s,id,lane,position_m
  Nanos vehicle_trace_period = from_s(1);
  std::ostream* slot_trace = nullptr;  // frame,node,slot,action
};

/// Simulates `cfg` with master seed `seed`. Identical inputs give identical
/// reports.
MetricsReport run(const ScenarioConfig& cfg, std::uint64_t seed, const RunOptions& options = {});

/// Period at which vehicles move and neighbour sets are refreshed.
Nanos mobility_tick_period(const ScenarioConfig& cfg);

}  // namespace vanetmac
