#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vanetmac/engine.hpp"

using namespace vanetmac;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small(MacProtocol protocol, int length = 500, double rate = 10.0, double range = 1000.0) {
  ScenarioConfig c;
  c.road_length = 2000.0;
  c.sim_duration = 150.0;
  c.mac_protocol = protocol;
  c.packet_length_mix = {{length, 1.0}};
  c.heartbeat_rate = rate;
  c.sensing_range = range;
  c.min_packets_for_extremes = 20;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void expect_conserved(const MetricsReport& r) {
  EXPECT_EQ(r.total_generated, r.total_transmitted + r.total_dropped + r.total_pending);
  std::int64_t gen = 0;
  for (const auto& n : r.nodes) {
    EXPECT_GT(n.generated, 0);
    EXPECT_EQ(n.generated, n.transmitted + n.dropped + n.pending);
    // A STDMA node can hold a second message when two heartbeats fall
    // between consecutive reserved slots.
    EXPECT_LE(n.pending, r.protocol == MacProtocol::Csma ? 1 : 2);
    EXPECT_EQ(static_cast<std::int64_t>(n.access_delays.size()), n.transmitted);
    gen += n.generated;
  }
  EXPECT_LE(gen, r.total_generated);
  for (std::size_t i = 1; i < r.nodes.size(); ++i) EXPECT_LT(r.nodes[i - 1].node, r.nodes[i].node);
}

}  // namespace

TEST(Engine, IsolatedCsmaNodesAccessAfterOneAifs) {
  auto cfg = small(MacProtocol::Csma);
  cfg.sensing_range = 1e-3;
  const auto r = run(cfg, 1);
  expect_conserved(r);
  ASSERT_FALSE(r.nodes.empty());
  EXPECT_EQ(r.total_dropped, 0);
  EXPECT_EQ(r.mean_neighbors(), 0.0);
  for (const auto& n : r.nodes)
    for (auto d : n.access_delays) ASSERT_EQ(d, cfg.timing.aifs);
  // Nobody is in range, so nothing is delivered.
  EXPECT_EQ(r.mac_to_mac.messages, 0);
}

TEST(Engine, IsolatedStdmaNodesNeverShare) {
  auto cfg = small(MacProtocol::Stdma);
  cfg.sensing_range = 1e-3;
  const auto r = run(cfg, 1);
  expect_conserved(r);
  EXPECT_EQ(r.total_dropped, 0);
  EXPECT_EQ(r.reused_slot_frames, 0);
  EXPECT_EQ(r.steals, 0);
  EXPECT_GT(r.slot_frames, 0);
}

TEST(Engine, CsmaConservationAndDelayFloor) {
  for (std::uint64_t seed : {1, 2}) {
    const auto cfg = small(MacProtocol::Csma);
    const auto r = run(cfg, seed);
    expect_conserved(r);
    EXPECT_GT(r.mean_neighbors(), 10.0);
    for (const auto& n : r.nodes)
      for (auto d : n.access_delays) ASSERT_GE(d, cfg.timing.aifs);
    EXPECT_FALSE(r.concurrent_tx_distances.empty());
    EXPECT_EQ(r.slot_frames, 0);
  }
}

// Heartbeats far faster than the channel can carry must be superseded.
TEST(Engine, OverloadedCsmaDrops) {
  auto cfg = small(MacProtocol::Csma, 500, 200.0);
  cfg.road_length = 600.0;
  cfg.sim_duration = 60.0;
  const auto r = run(cfg, 1);
  expect_conserved(r);
  const auto s = drop_summary(r);
  EXPECT_GT(s.mean, 0.3);
  EXPECT_LE(s.best, s.mean);
  EXPECT_LE(s.mean, s.worst);
  EXPECT_GT(max_consecutive_drops(r), 1);
  EXPECT_LT(access_delay_cdf(r.nodes.front()).at(1e12), 1.0);
}

TEST(Engine, StdmaGuarantees) {
  for (int length : {100, 500}) {
    const auto cfg = small(MacProtocol::Stdma, length);
    const auto r = run(cfg, 3);
    expect_conserved(r);
    EXPECT_EQ(r.total_dropped, 0);
    EXPECT_EQ(r.delay_bound_violations, 0);
    EXPECT_EQ(r.reservation_violations, 0);
    EXPECT_LE(r.max_access_delay, r.access_delay_bound);
    for (const auto& n : r.nodes)
      for (auto d : n.access_delays) ASSERT_LE(d, r.access_delay_bound);
    EXPECT_GT(r.slot_frames, 0);
    EXPECT_TRUE(r.concurrent_tx_distances.empty());
  }
}

TEST(Engine, SameSeedSameBytes) {
  const auto base = fs::temp_directory_path() / "vanetmac_engine_determinism";
  fs::remove_all(base);
  for (auto protocol : {MacProtocol::Csma, MacProtocol::Stdma}) {
    const auto cfg = small(protocol);
    const std::vector<MetricsReport> a{run(cfg, 7)}, b{run(cfg, 7)}, c{run(cfg, 8)};
    export_csv(a, base / "a");
    export_csv(b, base / "b");
    export_csv(c, base / "c");
    bool any_difference = false;
    for (const auto& entry : fs::directory_iterator(base / "a")) {
      const auto name = entry.path().filename();
      EXPECT_EQ(slurp(base / "a" / name), slurp(base / "b" / name)) << name;
      any_difference |= slurp(base / "a" / name) != slurp(base / "c" / name);
    }
    EXPECT_TRUE(any_difference);
    fs::remove_all(base);
  }
}

TEST(Engine, SlotTraceAndVehicleTrace) {
  auto cfg = small(MacProtocol::Stdma, 500, 10.0, 500.0);
  cfg.sim_duration = 30.0;
  std::ostringstream vehicles, slots;
  RunOptions o;
  o.vehicle_trace = &vehicles;
  o.slot_trace = &slots;
  run(cfg, 1, o);
  EXPECT_NE(vehicles.str().find(','), std::string::npos);
  EXPECT_NE(slots.str().find(",keep"), std::string::npos);
}

TEST(Engine, FinerMobilityTickChangesLittle) {
  auto coarse = small(MacProtocol::Csma, 500, 10.0, 1000.0);
  coarse.sensing_range = 500.0;
  auto fine = coarse;
  fine.mobility_tick = 10.0;
  const auto a = run(coarse, 4), b = run(fine, 4);
  expect_conserved(b);
  EXPECT_NEAR(drop_summary(a).mean, drop_summary(b).mean, 0.01);
  EXPECT_NEAR(a.mean_neighbors(), b.mean_neighbors(), 0.02 * a.mean_neighbors());
}

TEST(Engine, RejectsInvalidConfig) {
  auto cfg = small(MacProtocol::Csma);
  cfg.sensing_range = 0.0;
  EXPECT_THROW(run(cfg, 1), ConfigError);
}
