#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vanetmac/time.hpp"

namespace vanetmac {

/// Raised for every rejected configuration. `key()` names the offending field
/// (empty when the problem is not tied to one key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// PHY/MAC timing constants. Defaults are the highest-priority 802.11p
/// broadcast values at 3 Mbps.
struct TimingParams {
  Nanos slot_time = from_us(9);
  Nanos sifs = from_us(16);
  Nanos aifs = from_us(34);
  Nanos guard_time = from_us(3);
  Nanos preamble = from_us(20);
  double transfer_rate = 3e6;  // bits/s
  int cw_min = 3;

  bool operator==(const TimingParams&) const = default;
};

enum class MacProtocol { Csma, Stdma };

std::string_view to_string(MacProtocol p);
MacProtocol parse_protocol(std::string_view name);

struct LengthShare {
  int bytes = 0;
  double fraction = 0.0;
  bool operator==(const LengthShare&) const = default;
};

struct StatsRegion {
  double start = 1.0 / 3.0;
  double end = 2.0 / 3.0;
  bool operator==(const StatsRegion&) const = default;
};

struct ScenarioConfig {
  double road_length = 12000.0;  // m
  int lanes_per_direction = 3;
  int directions = 2;
  double mean_interarrival = 3.0;  // s, per lane
  std::vector<double> lane_mean_speeds{83.0, 108.0, 130.0};  // km/h, per lane index within a direction
  double speed_stddev = 1.0;  // m/s
  double lane_width = 3.5;  // m
  double sensing_range = 1000.0;  // m
  double heartbeat_rate = 10.0;  // Hz
  std::vector<LengthShare> packet_length_mix{{100, 0.3}, {300, 0.4}, {500, 0.3}};
  MacProtocol mac_protocol = MacProtocol::Csma;
  double stdma_frame_duration = 1.0;  // s
  double sim_duration = 5400.0;  // s
  std::optional<double> warmup;  // s; derived from road fill time when unset
  StatsRegion stats_region;
  double initial_tx_delay_max = 100.0;  // ms
  double mobility_tick = 100.0;  // ms
  double decode_time = 0.0;  // us
  int min_packets_for_extremes = 50;
  std::uint64_t rng_seed = 1;
  TimingParams timing;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Throws ConfigError on the first violated invariant.
void validate(const ScenarioConfig& cfg);

/// Parses a flat `key = value` document. `#` starts a comment; omitted keys
/// keep their defaults. Lists are comma separated; the length mix is written
/// as `bytes:fraction` pairs.
ScenarioConfig load_config(std::string_view document);
ScenarioConfig load_config_file(const std::filesystem::path& path);

/// Canonical document form; `load_config(to_document(c)) == c`.
std::string to_document(const ScenarioConfig& cfg);

/// FNV-1a over the canonical document.
std::uint64_t config_hash(const ScenarioConfig& cfg);

// Derived timing.

Nanos packet_airtime(int length_bytes, double rate_bps);
Nanos csma_tx_time(int length_bytes, const TimingParams& t);
Nanos stdma_tx_time(int length_bytes, const TimingParams& t);
/// Channel occupancy of one CSMA transmission (preamble + payload; AIFS is sensing time).
Nanos transmit_duration_csma(int length_bytes, const TimingParams& t);
/// STDMA slot length: the transmission time rounded up to a whole microsecond.
Nanos stdma_slot_duration(int length_bytes, const TimingParams& t);
std::int64_t slots_per_frame(Nanos frame, Nanos slot_duration);

int longest_packet(const ScenarioConfig& cfg);
Nanos effective_warmup(const ScenarioConfig& cfg);
int report_rate(const ScenarioConfig& cfg);
double kmh_to_ms(double kmh);

/// Shrinks road length and simulated time by `factor`, keeping densities.
ScenarioConfig scaled(ScenarioConfig cfg, double factor);

}  // namespace vanetmac
