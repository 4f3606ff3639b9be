#include "vanetmac/mobility.hpp"

#include <algorithm>
#include <stdexcept>

namespace vanetmac {

std::size_t World::alive_count() const {
  return static_cast<std::size_t>(std::count_if(vehicles.begin(), vehicles.end(), [](const Vehicle& v) { return v.alive; }));
}

namespace {
int lane_count(const ScenarioConfig& cfg) { return cfg.lanes_per_direction * cfg.directions; }

void check_lane(const ScenarioConfig& cfg, int lane) {
  if (lane < 0 || lane >= lane_count(cfg)) throw std::out_of_range("lane index " + std::to_string(lane) + " out of range");
}
}  // namespace

Direction lane_direction(const ScenarioConfig& cfg, int lane) {
  check_lane(cfg, lane);
  return lane < cfg.lanes_per_direction ? Direction::Forward : Direction::Reverse;
}

Nanos schedule_next_arrival(const ScenarioConfig& cfg, int lane, Nanos now, Rng& rng) {
  check_lane(cfg, lane);
  std::exponential_distribution<double> gap(1.0 / cfg.mean_interarrival);
  return now + from_s(gap(rng));
}

const Vehicle& spawn_vehicle(World& world, const ScenarioConfig& cfg, int lane, Nanos now, Rng& speed_rng,
                             Rng& length_rng) {
  check_lane(cfg, lane);
  const double mean = kmh_to_ms(cfg.lane_mean_speeds[static_cast<std::size_t>(lane % cfg.lanes_per_direction)]);
  std::normal_distribution<double> speed_dist(mean, cfg.speed_stddev);
  double speed = 0.0;
  do {
    speed = speed_dist(speed_rng);
  } while (speed <= 0.0);

  int length = cfg.packet_length_mix.front().bytes;
  if (cfg.packet_length_mix.size() > 1) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double draw = u(length_rng);
    length = cfg.packet_length_mix.back().bytes;
    for (const auto& share : cfg.packet_length_mix) {
      if (draw < share.fraction) {
        length = share.bytes;
        break;
      }
      draw -= share.fraction;
    }
  }

  Vehicle v;
  v.id = static_cast<VehicleId>(world.vehicles.size());
  v.lane = lane;
  v.direction = lane_direction(cfg, lane);
  v.position = 0.0;
  v.speed = speed;
  v.entry_time = now;
  v.packet_length = length;
  world.vehicles.push_back(v);
  return world.vehicles.back();
}

std::vector<VehicleId> advance(World& world, Nanos to) {
  if (to < world.clock) throw std::invalid_argument("advance: cannot move the clock backwards");
  std::vector<VehicleId> exited;
  const double dt = to_s(to - world.clock);
  if (dt > 0.0) {
    for (auto& v : world.vehicles) {
      if (!v.alive) continue;
      v.position += v.speed * dt;
      if (v.position > world.road_length) {
        v.alive = false;
        exited.push_back(v.id);
      }
    }
  }
  world.clock = to;
  return exited;
}

bool in_stats_region(const Vehicle& v, const ScenarioConfig& cfg) {
  const double frac = v.position / cfg.road_length;
  return frac >= cfg.stats_region.start && frac < cfg.stats_region.end;
}

}  // namespace vanetmac
