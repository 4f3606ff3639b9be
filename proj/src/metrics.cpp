#include "vanetmac/metrics.hpp"

#include "vanetmac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace vanetmac {

void NodeStats::record_drop() {
  ++dropped;
  ++current_consecutive_drops;
}

void NodeStats::record_transmit(Nanos access_delay) {
  ++transmitted;
  access_delays.push_back(access_delay);
  consecutive_drop_runs.push_back(current_consecutive_drops);
  current_consecutive_drops = 0;
}

void NodeStats::close_runs() {
  if (current_consecutive_drops > 0) consecutive_drop_runs.push_back(current_consecutive_drops);
  current_consecutive_drops = 0;
}

Cdf Cdf::from_samples(std::vector<double> samples) {
  Cdf c;
  c.total_ = samples.size();
  const auto finite_end = std::partition(samples.begin(), samples.end(), [](double v) { return std::isfinite(v); });
  c.infinite_ = static_cast<std::size_t>(samples.end() - finite_end);
  samples.erase(finite_end, samples.end());
  std::sort(samples.begin(), samples.end());
  c.values_ = std::move(samples);
  return c;
}

double Cdf::at(double x) const {
  if (total_ == 0) return 0.0;
  const auto n = std::upper_bound(values_.begin(), values_.end(), x) - values_.begin();
  return static_cast<double>(n) / static_cast<double>(total_);
}

double Cdf::below(double x) const {
  if (total_ == 0) return 0.0;
  const auto n = std::lower_bound(values_.begin(), values_.end(), x) - values_.begin();
  return static_cast<double>(n) / static_cast<double>(total_);
}

double Cdf::mean_finite() const {
  if (values_.empty()) return 0.0;
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

std::vector<std::pair<double, double>> Cdf::steps() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i + 1 < values_.size() && values_[i + 1] == values_[i]) continue;
    out.emplace_back(values_[i], static_cast<double>(i + 1) / static_cast<double>(total_));
  }
  return out;
}

Cdf access_delay_cdf(const NodeStats& stats) {
  const NodeStats* one[] = {&stats};
  return access_delay_cdf(one);
}

Cdf access_delay_cdf(std::span<const NodeStats* const> nodes) {
  std::vector<double> samples;
  for (const auto* n : nodes) {
    for (auto d : n->access_delays) samples.push_back(to_us(d));
    samples.insert(samples.end(), static_cast<std::size_t>(n->dropped), kInfinity);
  }
  return Cdf::from_samples(std::move(samples));
}

CellKey cell_of(const ScenarioConfig& cfg) { return {longest_packet(cfg), cfg.heartbeat_rate, cfg.sensing_range}; }

Nanos mac_to_mac_delay(Nanos access_delay, double distance_m, Nanos decode_time) {
  return access_delay + propagation_delay(distance_m) + decode_time;
}

std::vector<const NodeStats*> eligible_nodes(const MetricsReport& r) {
  std::vector<const NodeStats*> out;
  for (const auto& n : r.nodes) {
    if (n.generated >= r.min_packets_for_extremes) out.push_back(&n);
  }
  return out;
}

const NodeStats* best_node(const MetricsReport& r) {
  const NodeStats* best = nullptr;
  for (const auto* n : eligible_nodes(r)) {
    if (!best || n->drop_rate() < best->drop_rate()) best = n;
  }
  return best;
}

const NodeStats* worst_node(const MetricsReport& r) {
  const NodeStats* worst = nullptr;
  for (const auto* n : eligible_nodes(r)) {
    if (!worst || n->drop_rate() > worst->drop_rate()) worst = n;
  }
  return worst;
}

DropSummary drop_summary(const MetricsReport& r) {
  DropSummary s;
  std::int64_t gen = 0;
  std::int64_t drop = 0;
  for (const auto& n : r.nodes) {
    gen += n.generated;
    drop += n.dropped;
  }
  s.mean = gen == 0 ? 0.0 : static_cast<double>(drop) / static_cast<double>(gen);
  if (const auto* b = best_node(r)) s.best = b->drop_rate();
  if (const auto* w = worst_node(r)) s.worst = w->drop_rate();
  return s;
}

Cdf consecutive_drop_cdf(const NodeStats& node) {
  std::vector<double> samples(node.consecutive_drop_runs.begin(), node.consecutive_drop_runs.end());
  return Cdf::from_samples(std::move(samples));
}

Cdf consecutive_drop_cdf(const MetricsReport& r) {
  std::vector<double> samples;
  for (const auto& n : r.nodes) samples.insert(samples.end(), n.consecutive_drop_runs.begin(), n.consecutive_drop_runs.end());
  return Cdf::from_samples(std::move(samples));
}

std::int64_t max_consecutive_drops(const MetricsReport& r) {
  std::int64_t m = 0;
  for (const auto& n : r.nodes) {
    for (auto run : n.consecutive_drop_runs) m = std::max(m, run);
  }
  return m;
}

SlotReuse slot_reuse_stats(const MetricsReport& r) {
  SlotReuse s;
  s.fraction = r.slot_frames == 0 ? 0.0 : static_cast<double>(r.reused_slot_frames) / static_cast<double>(r.slot_frames);
  s.min_distance = Cdf::from_samples(r.slot_share_distances);
  s.mean_sharer_distance = s.min_distance.mean_finite();
  return s;
}

Cdf concurrent_tx_min_distance(const MetricsReport& r) { return Cdf::from_samples(r.concurrent_tx_distances); }

namespace {

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string cell_columns(const CellKey& c) {
  return std::to_string(c.length) + "," + general(c.rate_hz) + "," + general(c.range_m);
}

std::ofstream open_csv(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  return out;
}

void write_steps(std::ofstream& out, const std::string& label, const Cdf& cdf, int value_decimals) {
  for (const auto& [value, frac] : cdf.steps()) {
    out << label << ',' << fixed(value, value_decimals) << ',' << fixed(frac, 4) << '\n';
  }
}

Cdf delay_cdf_us(std::span<const NodeStats* const> nodes) {
  std::vector<double> samples;
  for (const auto* n : nodes) {
    for (auto d : n->access_delays) samples.push_back(static_cast<double>(display_us(d)));
    samples.insert(samples.end(), static_cast<std::size_t>(n->dropped), kInfinity);
  }
  return Cdf::from_samples(std::move(samples));
}

Cdf rounded_distance_cdf(const std::vector<double>& distances) {
  std::vector<double> samples;
  samples.reserve(distances.size());
  for (double d : distances) samples.push_back(std::isfinite(d) ? std::round(d * 10.0) / 10.0 : d);
  return Cdf::from_samples(std::move(samples));
}

}  // namespace

DropRow drop_row(std::span<const MetricsReport> runs) {
  if (runs.empty()) throw std::invalid_argument("drop_row needs at least one run");
  std::vector<double> means, bests, worsts;
  for (const auto& r : runs) {
    const auto s = drop_summary(r);
    means.push_back(100.0 * s.mean);
    bests.push_back(100.0 * s.best);
    worsts.push_back(100.0 * s.worst);
  }
  return {runs.front().cell, mean_of(means), mean_of(bests), mean_of(worsts), stddev_of(means), runs.size()};
}

ReuseRow reuse_row(std::span<const MetricsReport> runs) {
  if (runs.empty()) throw std::invalid_argument("reuse_row needs at least one run");
  std::vector<double> fractions;
  std::vector<double> distances;
  std::int64_t steals = 0;
  for (const auto& r : runs) {
    fractions.push_back(100.0 * slot_reuse_stats(r).fraction);
    for (double d : r.slot_share_distances) {
      if (std::isfinite(d)) distances.push_back(d);
    }
    steals += r.steals;
  }
  return {runs.front().cell, mean_of(fractions), mean_of(distances), stddev_of(fractions), steals, runs.size()};
}

std::vector<DropRow> drop_rate_table(std::span<const std::vector<MetricsReport>> cells) {
  std::vector<DropRow> rows;
  for (const auto& runs : cells) rows.push_back(drop_row(runs));
  return rows;
}

void write_drops_table(std::span<const DropRow> rows, const std::filesystem::path& file) {
  auto out = open_csv(file);
  out << "length,rate_hz,range_m,mean_drop_pct,best_pct,worst_pct\n";
  for (const auto& r : rows) {
    out << cell_columns(r.cell) << ',' << fixed(r.mean_pct, 2) << ',' << fixed(r.best_pct, 2) << ','
        << fixed(r.worst_pct, 2) << '\n';
  }
}

void write_slot_reuse_table(std::span<const ReuseRow> rows, const std::filesystem::path& file) {
  auto out = open_csv(file);
  out << "length,rate_hz,range_m,reuse_pct,mean_sharer_distance_m,steals\n";
  for (const auto& r : rows) {
    out << cell_columns(r.cell) << ',' << fixed(r.reuse_pct, 2) << ',' << fixed(r.mean_sharer_distance_m, 1) << ','
        << r.steals << '\n';
  }
}

void export_csv(std::span<const MetricsReport> runs, const std::filesystem::path& directory) {
  if (runs.empty()) throw std::invalid_argument("export_csv needs at least one run");
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create '" + directory.string() + "': " + ec.message());

  const auto row = drop_row(runs);
  write_drops_table(std::span(&row, 1), directory / "drops_table.csv");

  {
    std::vector<const NodeStats*> all, best, worst;
    for (const auto& r : runs) {
      for (const auto& n : r.nodes) all.push_back(&n);
      if (const auto* b = best_node(r)) best.push_back(b);
      if (const auto* w = worst_node(r)) worst.push_back(w);
    }
    auto out = open_csv(directory / "access_delay_cdf.csv");
    out << "who,delay_us,cum_frac\n";
    write_steps(out, "best", delay_cdf_us(best), 0);
    write_steps(out, "avg", delay_cdf_us(all), 0);
    write_steps(out, "worst", delay_cdf_us(worst), 0);
  }

  {
    std::vector<double> pooled, worst;
    for (const auto& r : runs) {
      for (const auto& n : r.nodes) pooled.insert(pooled.end(), n.consecutive_drop_runs.begin(), n.consecutive_drop_runs.end());
      if (const auto* w = worst_node(r)) worst.insert(worst.end(), w->consecutive_drop_runs.begin(), w->consecutive_drop_runs.end());
    }
    auto out = open_csv(directory / "consec_drops_cdf.csv");
    out << "who,run_length,cum_frac\n";
    write_steps(out, "pooled", Cdf::from_samples(pooled), 0);
    write_steps(out, "worst", Cdf::from_samples(worst), 0);
  }

  if (runs.front().protocol == MacProtocol::Stdma) {
    const auto reuse = reuse_row(runs);
    write_slot_reuse_table(std::span(&reuse, 1), directory / "slot_reuse.csv");
  } else {
    write_slot_reuse_table({}, directory / "slot_reuse.csv");
  }

  {
    std::vector<double> share, concurrent;
    for (const auto& r : runs) {
      share.insert(share.end(), r.slot_share_distances.begin(), r.slot_share_distances.end());
      concurrent.insert(concurrent.end(), r.concurrent_tx_distances.begin(), r.concurrent_tx_distances.end());
    }
    auto out = open_csv(directory / "min_distance_cdf.csv");
    out << "kind,distance_m,cum_frac\n";
    write_steps(out, "slot_share", rounded_distance_cdf(share), 1);
    write_steps(out, "concurrent_tx", rounded_distance_cdf(concurrent), 1);
  }

  {
    auto out = open_csv(directory / "run_meta.csv");
    out << "seed,config_hash,protocol,sim_duration_s,mean_neighbors,generated,transmitted,dropped,pending,"
           "mac_to_mac_mean_us,deadline_met_frac,delay_bound_violations,reservation_violations\n";
    for (const auto& r : runs) {
      char hash[32];
      std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(r.config_hash));
      out << r.seed << ',' << hash << ',' << to_string(r.protocol) << ',' << fixed(r.sim_duration_s, 1) << ','
          << fixed(r.mean_neighbors(), 1) << ',' << r.total_generated << ',' << r.total_transmitted << ','
          << r.total_dropped << ',' << r.total_pending << ',' << fixed(r.mac_to_mac.mean_us(), 1) << ','
          << fixed(r.mac_to_mac.deadline_fraction(), 4) << ',' << r.delay_bound_violations << ','
          << r.reservation_violations << '\n';
    }
  }
}

}  // namespace vanetmac
