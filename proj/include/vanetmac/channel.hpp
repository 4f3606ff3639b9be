#pragma once

#include <vector>

#include "vanetmac/mobility.hpp"
#include "vanetmac/time.hpp"

namespace vanetmac {

inline constexpr double kSpeedOfLight = 2.99792458e8;  // m/s

/// Binary circular channel: anyone within `range` senses and receives perfectly.
struct SensingModel {
  double range = 1000.0;
};

/// Position on the shared road plane: x along the forward direction, y across lanes.
struct RoadPoint {
  double x = 0.0;
  double y = 0.0;
};

RoadPoint project(const Vehicle& v, double road_length, double lane_width);
double distance(const RoadPoint& a, const RoadPoint& b);
double distance(const Vehicle& a, const Vehicle& b, double road_length, double lane_width = 3.5);

/// Boundary inclusive.
bool within_range(const Vehicle& a, const Vehicle& b, const SensingModel& m, double road_length,
                  double lane_width = 3.5);

/// Received power minus noise floor; `noise` is linear.
double snr_db(double power_rcvd_db, double noise);
double sinr_db(double power_rcvd_db, double power_interference, double noise);

Nanos propagation_delay(double distance_m);

/// In-range neighbour lists for every alive vehicle, rebuilt at mobility advances.
class NeighborTable {
 public:
  void rebuild(const World& world, const SensingModel& model, double lane_width);

  /// In-range alive vehicles, in no particular order.
  const std::vector<VehicleId>& of(VehicleId id) const { return lists_[id]; }
  const RoadPoint& point(VehicleId id) const { return points_[id]; }

 private:
  std::vector<std::vector<VehicleId>> lists_;
  std::vector<RoadPoint> points_;
  std::vector<VehicleId> order_;  // alive vehicles by x
  VehicleId known_ = 0;
};

}  // namespace vanetmac
