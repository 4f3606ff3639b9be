#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "vanetmac/channel.hpp"

using namespace vanetmac;

namespace {

Vehicle car(VehicleId id, int lane, double position) {
  Vehicle v;
  v.id = id;
  v.lane = lane;
  v.direction = lane < 3 ? Direction::Forward : Direction::Reverse;
  v.position = position;
  v.speed = 30.0;
  return v;
}

}  // namespace

TEST(Distance, Examples) {
  const double road = 12000.0;
  EXPECT_DOUBLE_EQ(distance(car(0, 1, 100), car(1, 1, 600), road), 500.0);
  EXPECT_DOUBLE_EQ(distance(car(0, 1, 100), car(1, 2, 100), road), 3.5);
  // Reverse lanes count from the far end of the road.
  EXPECT_DOUBLE_EQ(distance(car(0, 2, 2000), car(1, 3, 10000), road), 3.5);
  EXPECT_NEAR(distance(car(0, 0, 0), car(1, 5, 12000), road), 5 * 3.5, 1e-9);
}

TEST(Distance, SymmetricAndRangeInclusive) {
  Rng rng(1);
  std::uniform_real_distribution<double> pos(0.0, 12000.0);
  std::uniform_int_distribution<int> lane(0, 5);
  const SensingModel m{1000.0};
  for (int i = 0; i < 1000; ++i) {
    const auto a = car(0, lane(rng), pos(rng));
    const auto b = car(1, lane(rng), pos(rng));
    EXPECT_EQ(distance(a, b, 12000.0), distance(b, a, 12000.0));
    EXPECT_EQ(within_range(a, b, m, 12000.0), within_range(b, a, m, 12000.0));
  }
  EXPECT_TRUE(within_range(car(0, 0, 0), car(1, 0, 500), SensingModel{500.0}, 12000.0));
  EXPECT_FALSE(within_range(car(0, 0, 0), car(1, 0, 1001), SensingModel{1000.0}, 12000.0));
}

TEST(RadioFormulas, SnrAndSinr) {
  EXPECT_DOUBLE_EQ(snr_db(0.0, 1.0), 0.0);
  EXPECT_NEAR(snr_db(10.0, 10.0), 0.0, 1e-12);
  EXPECT_NEAR(snr_db(-90.0, 1e-12), 30.0, 1e-9);
  EXPECT_NEAR(sinr_db(0.0, 9.0, 1.0), -10.0, 1e-12);
  EXPECT_THROW(snr_db(0.0, 0.0), std::domain_error);
  EXPECT_THROW(sinr_db(0.0, -1.0, 0.5), std::domain_error);
  Rng rng(2);
  std::uniform_real_distribution<double> p(-120.0, 20.0), n(1e-15, 1.0), i(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double pr = p(rng), noise = n(rng);
    EXPECT_NEAR(sinr_db(pr, 0.0, noise), snr_db(pr, noise), 1e-9);
    EXPECT_LE(sinr_db(pr, i(rng), noise), snr_db(pr, noise));
  }
}

TEST(Propagation, SpeedOfLight) {
  EXPECT_EQ(propagation_delay(0.0), Nanos{0});
  EXPECT_NEAR(to_us(propagation_delay(300.0)), 1.0007, 1e-3);
  EXPECT_NEAR(to_us(propagation_delay(1000.0)), 3.336, 1e-3);
}

// The sliding-window table against an all-pairs scan on random worlds.
TEST(NeighborTable, MatchesBruteForce) {
  Rng rng(7);
  for (double range : {500.0, 1000.0}) {
    World w;
    w.road_length = 3000.0;
    std::uniform_real_distribution<double> pos(0.0, 3000.0), speed(20.0, 40.0);
    std::uniform_int_distribution<int> lane(0, 5);
    for (VehicleId id = 0; id < 300; ++id) {
      auto v = car(id, lane(rng), pos(rng));
      v.speed = speed(rng);
      v.alive = id % 17 != 0;
      w.vehicles.push_back(v);
    }
    NeighborTable table;
    const SensingModel m{range};
    for (int step = 0; step < 5; ++step) {
      table.rebuild(w, m, 3.5);
      for (const auto& a : w.vehicles) {
        std::vector<VehicleId> expected;
        if (a.alive) {
          for (const auto& b : w.vehicles) {
            if (b.alive && b.id != a.id && within_range(a, b, m, w.road_length)) expected.push_back(b.id);
          }
        }
        auto got = table.of(a.id);
        std::sort(got.begin(), got.end());
        ASSERT_EQ(got, expected) << "vehicle " << a.id << " step " << step;
      }
      advance(w, w.clock + from_s(2));
      // Late arrivals join the table on the next rebuild.
      auto v = car(static_cast<VehicleId>(w.vehicles.size()), lane(rng), 0.0);
      w.vehicles.push_back(v);
    }
  }
}
