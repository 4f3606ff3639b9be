#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "vanetmac/mobility.hpp"

using namespace vanetmac;

TEST(Arrivals, ExponentialMean) {
  const ScenarioConfig cfg;
  auto rng = make_stream(11, "arrivals", 0);
  Nanos now{0};
  const int n = 10000;
  for (int i = 0; i < n; ++i) now = schedule_next_arrival(cfg, 0, now, rng);
  EXPECT_NEAR(to_s(now) / n, 3.0, 0.06);
}

TEST(Arrivals, LanesUseDistinctStreams) {
  const ScenarioConfig cfg;
  auto a = make_stream(5, "arrivals", 0);
  auto b = make_stream(5, "arrivals", 1);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += schedule_next_arrival(cfg, 0, Nanos{0}, a) == schedule_next_arrival(cfg, 1, Nanos{0}, b);
  EXPECT_EQ(same, 0);
}

TEST(Spawn, SpeedDistribution) {
  ScenarioConfig cfg;
  World w;
  w.road_length = cfg.road_length;
  auto speeds = make_stream(3, "speeds", 0);
  auto lengths = make_stream(3, "lengths");
  const int n = 10000;
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(spawn_vehicle(w, cfg, 0, Nanos{0}, speeds, lengths).speed);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1));
  EXPECT_NEAR(mean, 83.0 / 3.6, 0.01 * 83.0 / 3.6);
  EXPECT_NEAR(sd, 1.0, 0.05);
}

TEST(Spawn, LanesDirectionsAndIds) {
  ScenarioConfig cfg;
  World w;
  w.road_length = cfg.road_length;
  auto speeds = make_stream(3, "speeds", 0);
  auto lengths = make_stream(3, "lengths");
  for (int lane = 0; lane < 6; ++lane) {
    const auto& v = spawn_vehicle(w, cfg, lane, from_s(7), speeds, lengths);
    EXPECT_EQ(v.id, static_cast<VehicleId>(lane));
    EXPECT_EQ(v.position, 0.0);
    EXPECT_EQ(v.entry_time, from_s(7));
    EXPECT_EQ(v.direction, lane < 3 ? Direction::Forward : Direction::Reverse);
    EXPECT_NEAR(v.speed, kmh_to_ms(cfg.lane_mean_speeds[static_cast<std::size_t>(lane % 3)]), 6.0);
  }
  EXPECT_THROW(spawn_vehicle(w, cfg, 6, Nanos{0}, speeds, lengths), std::out_of_range);
  EXPECT_THROW(spawn_vehicle(w, cfg, -1, Nanos{0}, speeds, lengths), std::out_of_range);
}

TEST(Spawn, LengthMixFrequencies) {
  ScenarioConfig cfg;
  World w;
  w.road_length = cfg.road_length;
  auto speeds = make_stream(4, "speeds", 0);
  auto lengths = make_stream(4, "lengths");
  std::map<int, int> counts;
  const int n = 20000;
  for (int i = 0; i < n; ++i) ++counts[spawn_vehicle(w, cfg, 0, Nanos{0}, speeds, lengths).packet_length];
  EXPECT_NEAR(counts[100] / double(n), 0.3, 0.015);
  EXPECT_NEAR(counts[300] / double(n), 0.4, 0.015);
  EXPECT_NEAR(counts[500] / double(n), 0.3, 0.015);
}

TEST(Advance, Kinematics) {
  World w;
  w.road_length = 12000.0;
  w.vehicles.push_back(Vehicle{0, 0, Direction::Forward, 0.0, 30.0, Nanos{0}, 100, true});
  w.vehicles.push_back(Vehicle{1, 3, Direction::Reverse, 11999.0, 30.0, Nanos{0}, 100, true});
  auto exited = advance(w, from_s(1));
  EXPECT_EQ(exited, std::vector<VehicleId>{1});
  EXPECT_FALSE(w.vehicles[1].alive);
  EXPECT_DOUBLE_EQ(w.vehicles[0].position, 30.0);
  advance(w, from_s(10));
  EXPECT_DOUBLE_EQ(w.vehicles[0].position, 300.0);
  const auto before = w.vehicles[0].position;
  EXPECT_TRUE(advance(w, w.clock).empty());
  EXPECT_EQ(w.vehicles[0].position, before);
  EXPECT_THROW(advance(w, from_s(5)), std::invalid_argument);
  EXPECT_EQ(w.alive_count(), 1u);
}

TEST(StatsRegion, MiddleThird) {
  ScenarioConfig cfg;
  Vehicle v;
  v.position = 6000.0;
  EXPECT_TRUE(in_stats_region(v, cfg));
  v.position = 0.0;
  EXPECT_FALSE(in_stats_region(v, cfg));
  v.position = 8000.0;
  EXPECT_FALSE(in_stats_region(v, cfg));
  cfg.stats_region = {0.0, 1.0};
  for (double p : {0.0, 1.0, 5000.0, 11999.9}) {
    v.position = p;
    EXPECT_TRUE(in_stats_region(v, cfg));
  }
}

// Drives the generator alone and compares the steady-state population with
// Little's law: each lane holds (traversal time / mean interarrival) cars.
TEST(Population, MatchesLittlesLaw) {
  ScenarioConfig cfg = scaled(ScenarioConfig{}, 0.25);
  World w;
  w.road_length = cfg.road_length;
  std::vector<Rng> arrivals, speeds;
  std::vector<Nanos> next;
  for (int lane = 0; lane < 6; ++lane) {
    arrivals.push_back(make_stream(9, "arrivals", static_cast<std::uint64_t>(lane)));
    speeds.push_back(make_stream(9, "speeds", static_cast<std::uint64_t>(lane)));
    next.push_back(schedule_next_arrival(cfg, lane, Nanos{0}, arrivals.back()));
  }
  auto lengths = make_stream(9, "lengths");
  double expected = 0.0;
  for (int lane = 0; lane < 6; ++lane) expected += cfg.road_length / kmh_to_ms(cfg.lane_mean_speeds[lane % 3]) / 3.0;

  const Nanos warm = effective_warmup(cfg);
  double sum = 0.0;
  int samples = 0;
  std::vector<double> last_position;
  for (Nanos t = from_s(1); t <= from_s(3000); t += from_s(1)) {
    for (;;) {
      const auto lane = static_cast<int>(std::min_element(next.begin(), next.end()) - next.begin());
      if (next[lane] > t) break;
      advance(w, next[lane]);
      spawn_vehicle(w, cfg, lane, next[lane], speeds[lane], lengths);
      next[lane] = schedule_next_arrival(cfg, lane, next[lane], arrivals[lane]);
    }
    advance(w, t);
    last_position.resize(w.vehicles.size(), 0.0);
    for (const auto& v : w.vehicles) {
      EXPECT_GE(v.position, last_position[v.id]);
      last_position[v.id] = v.position;
      if (v.alive) EXPECT_LE(v.position, cfg.road_length);
    }
    if (t >= warm) {
      sum += static_cast<double>(w.alive_count());
      ++samples;
    }
  }
  EXPECT_NEAR(sum / samples, expected, 0.1 * expected);
}
