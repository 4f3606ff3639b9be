#pragma once

#include <cstdint>
#include <vector>

#include "vanetmac/config.hpp"
#include "vanetmac/rng.hpp"
#include "vanetmac/time.hpp"

namespace vanetmac {

using VehicleId = std::uint32_t;

enum class Direction { Forward, Reverse };

/// A car on the highway. Lane and speed are fixed at spawn; `position` is
/// measured along the vehicle's own direction of travel from its entry point.
struct Vehicle {
  VehicleId id = 0;
  int lane = 0;  // 0 .. lanes_per_direction * directions - 1
  Direction direction = Direction::Forward;
  double position = 0.0;  // m
  double speed = 0.0;  // m/s
  Nanos entry_time{0};
  int packet_length = 0;  // bytes
  bool alive = true;
};

struct World {
  std::vector<Vehicle> vehicles;  // indexed by id
  double road_length = 0.0;
  Nanos clock{0};

  std::size_t alive_count() const;
};

/// Draws the next Poisson arrival instant for one lane.
Nanos schedule_next_arrival(const ScenarioConfig& cfg, int lane, Nanos now, Rng& rng);

/// Lane-major: lanes [0, lanes_per_direction) drive forward, the rest reverse.
Direction lane_direction(const ScenarioConfig& cfg, int lane);

/// Appends a new vehicle at the lane's entry point. Speed is Gaussian around
/// the lane's mean and redrawn until positive; the packet length is drawn
/// from the configured mix with `length_rng`.
const Vehicle& spawn_vehicle(World& world, const ScenarioConfig& cfg, int lane, Nanos now, Rng& speed_rng,
                             Rng& length_rng);

/// Moves every alive vehicle to time `to`. Returns ids of vehicles that left
/// the road during this step (they are marked dead).
std::vector<VehicleId> advance(World& world, Nanos to);

bool in_stats_region(const Vehicle& v, const ScenarioConfig& cfg);

}  // namespace vanetmac
