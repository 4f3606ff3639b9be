#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vanetmac/config.hpp"
#include "vanetmac/mobility.hpp"
#include "vanetmac/time.hpp"

namespace vanetmac {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr Nanos kDeliveryDeadline = from_ms(100);

/// Per-vehicle counters, restricted to packets generated inside the stats
/// region after warm-up.
struct NodeStats {
  VehicleId node = 0;
  std::int64_t generated = 0;
  std::int64_t transmitted = 0;
  std::int64_t dropped = 0;
  std::int64_t pending = 0;
  std::vector<Nanos> access_delays;
  std::int64_t current_consecutive_drops = 0;
  /// Drops immediately preceding each successful access, plus a trailing run
  /// if the node stopped while still dropping.
  std::vector<std::int64_t> consecutive_drop_runs;

  double drop_rate() const { return generated == 0 ? 0.0 : static_cast<double>(dropped) / static_cast<double>(generated); }
  void record_drop();
  void record_transmit(Nanos access_delay);
  void close_runs();
};

/// Empirical CDF. Samples at +infinity (dropped packets, no concurrent
/// transmitter) only lower the plateau.
class Cdf {
 public:
  Cdf() = default;
  static Cdf from_samples(std::vector<double> samples);

  /// Pr{X <= x}.
  double at(double x) const;
  /// Pr{X < x}.
  double below(double x) const;
  double mass_at_infinity() const { return total_ == 0 ? 0.0 : static_cast<double>(infinite_) / static_cast<double>(total_); }
  std::size_t sample_count() const { return total_; }
  bool empty() const { return total_ == 0; }
  double max_finite() const { return values_.empty() ? 0.0 : values_.back(); }
  double mean_finite() const;

  /// Distinct finite values with Pr{X <= value}.
  std::vector<std::pair<double, double>> steps() const;

 private:
  std::vector<double> values_;  // sorted finite samples
  std::size_t infinite_ = 0;
  std::size_t total_ = 0;
};

Cdf access_delay_cdf(const NodeStats& stats);
Cdf access_delay_cdf(std::span<const NodeStats* const> nodes);

struct CellKey {
  int length = 0;
  double rate_hz = 0.0;
  double range_m = 0.0;
  bool operator==(const CellKey&) const = default;
};

CellKey cell_of(const ScenarioConfig& cfg);

struct MacToMacSummary {
  std::int64_t messages = 0;
  double sum_mean_us = 0.0;
  std::int64_t within_deadline = 0;

  double mean_us() const { return messages == 0 ? 0.0 : sum_mean_us / static_cast<double>(messages); }
  double deadline_fraction() const { return messages == 0 ? 1.0 : static_cast<double>(within_deadline) / static_cast<double>(messages); }
};

/// T_acc + propagation + decode for one receiver.
Nanos mac_to_mac_delay(Nanos access_delay, double distance_m, Nanos decode_time);

struct MetricsReport {
  MacProtocol protocol = MacProtocol::Csma;
  CellKey cell;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  double sim_duration_s = 0.0;
  double heartbeat_rate = 10.0;
  int min_packets_for_extremes = 1;

  std::vector<NodeStats> nodes;  // sorted by id, stats-region packets only

  // Whole-run conservation, all vehicles and all packets.
  std::int64_t total_generated = 0;
  std::int64_t total_transmitted = 0;
  std::int64_t total_dropped = 0;
  std::int64_t total_pending = 0;

  double neighbor_sum = 0.0;
  std::int64_t neighbor_samples = 0;

  MacToMacSummary mac_to_mac;

  /// CSMA: per stats-region transmission, distance to the nearest temporally
  /// overlapping transmission (+inf if none).
  std::vector<double> concurrent_tx_distances;

  // STDMA.
  std::int64_t slot_frames = 0;
  std::int64_t reused_slot_frames = 0;
  std::vector<double> slot_share_distances;
  std::int64_t steals = 0;
  std::int64_t reallocations = 0;
  std::int64_t repeat_transmissions = 0;
  std::int64_t delay_bound_violations = 0;
  std::int64_t reservation_violations = 0;
  Nanos max_access_delay{0};
  Nanos access_delay_bound{0};

  double mean_neighbors() const { return neighbor_samples == 0 ? 0.0 : neighbor_sum / static_cast<double>(neighbor_samples); }
};

/// Nodes with at least `min_packets_for_extremes` generated packets.
std::vector<const NodeStats*> eligible_nodes(const MetricsReport& r);
const NodeStats* best_node(const MetricsReport& r);
const NodeStats* worst_node(const MetricsReport& r);

struct DropSummary {
  double mean = 0.0;  // pooled over every stats-region packet
  double best = 0.0;
  double worst = 0.0;
};
DropSummary drop_summary(const MetricsReport& r);

/// Samples are the gap lengths of every stats-region node pooled, or of one node.
Cdf consecutive_drop_cdf(const MetricsReport& r);
Cdf consecutive_drop_cdf(const NodeStats& node);
std::int64_t max_consecutive_drops(const MetricsReport& r);

struct SlotReuse {
  double fraction = 0.0;
  double mean_sharer_distance = 0.0;
  Cdf min_distance;
};
SlotReuse slot_reuse_stats(const MetricsReport& r);

Cdf concurrent_tx_min_distance(const MetricsReport& r);

/// One drop-table row per cell: seed means of the pooled, best and worst rates.
struct DropRow {
  CellKey cell;
  double mean_pct = 0.0;
  double best_pct = 0.0;
  double worst_pct = 0.0;
  double mean_stddev_pct = 0.0;
  std::size_t seeds = 0;
};
DropRow drop_row(std::span<const MetricsReport> runs);

struct ReuseRow {
  CellKey cell;
  double reuse_pct = 0.0;
  double mean_sharer_distance_m = 0.0;
  double reuse_stddev_pct = 0.0;
  std::int64_t steals = 0;
  std::size_t seeds = 0;
};
ReuseRow reuse_row(std::span<const MetricsReport> runs);

/// Table over (length x rate x range); cells in the given order.
std::vector<DropRow> drop_rate_table(std::span<const std::vector<MetricsReport>> cells);

/// Writes the six CSV files for the runs of one cell (one or more seeds).
void export_csv(std::span<const MetricsReport> runs, const std::filesystem::path& directory);
void write_drops_table(std::span<const DropRow> rows, const std::filesystem::path& file);
void write_slot_reuse_table(std::span<const ReuseRow> rows, const std::filesystem::path& file);

}  // namespace vanetmac
