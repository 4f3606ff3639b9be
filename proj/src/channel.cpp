#include "vanetmac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vanetmac {

RoadPoint project(const Vehicle& v, double road_length, double lane_width) {
  const double x = v.direction == Direction::Forward ? v.position : road_length - v.position;
  return {x, v.lane * lane_width};
}

double distance(const RoadPoint& a, const RoadPoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double distance(const Vehicle& a, const Vehicle& b, double road_length, double lane_width) {
  return distance(project(a, road_length, lane_width), project(b, road_length, lane_width));
}

bool within_range(const Vehicle& a, const Vehicle& b, const SensingModel& m, double road_length, double lane_width) {
  return distance(a, b, road_length, lane_width) <= m.range;
}

double snr_db(double power_rcvd_db, double noise) {
  if (!(noise > 0.0)) throw std::domain_error("noise power must be positive");
  return power_rcvd_db - 10.0 * std::log10(noise);
}

double sinr_db(double power_rcvd_db, double power_interference, double noise) {
  if (power_interference < 0.0) throw std::domain_error("interference power must be non-negative");
  if (!(noise > 0.0)) throw std::domain_error("noise power must be positive");
  return power_rcvd_db - 10.0 * std::log10(power_interference + noise);
}

Nanos propagation_delay(double distance_m) {
  if (distance_m < 0.0) throw std::domain_error("distance must be non-negative");
  return Nanos{static_cast<Nanos::rep>(std::llround(distance_m / kSpeedOfLight * 1e9))};
}

void NeighborTable::rebuild(const World& world, const SensingModel& model, double lane_width) {
  const auto n = world.vehicles.size();
  lists_.resize(n);
  points_.resize(n);
  // Keep last rebuild's order: vehicles rarely swap places between ticks, so
  // the insertion sort below is close to linear.
  std::erase_if(order_, [&](VehicleId id) {
    if (world.vehicles[id].alive) return false;
    lists_[id].clear();
    return true;
  });
  for (VehicleId id = known_; id < n; ++id) {
    if (world.vehicles[id].alive) order_.push_back(id);
  }
  known_ = static_cast<VehicleId>(n);
  for (auto id : order_) {
    lists_[id].clear();
    points_[id] = project(world.vehicles[id], world.road_length, lane_width);
  }
  auto before = [this](VehicleId a, VehicleId b) {
    return points_[a].x < points_[b].x || (points_[a].x == points_[b].x && a < b);
  };
  for (std::size_t i = 1; i < order_.size(); ++i) {
    const auto id = order_[i];
    auto j = i;
    for (; j > 0 && before(id, order_[j - 1]); --j) order_[j] = order_[j - 1];
    order_[j] = id;
  }
  // Sliding window over x; the lateral term only ever shrinks the range.
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const auto& pi = points_[order_[i]];
    for (std::size_t j = i + 1; j < order_.size(); ++j) {
      const auto& pj = points_[order_[j]];
      if (pj.x - pi.x > model.range) break;
      if (distance(pi, pj) <= model.range) {
        lists_[order_[i]].push_back(order_[j]);
        lists_[order_[j]].push_back(order_[i]);
      }
    }
  }
}

}  // namespace vanetmac
