#include "vanetmac/engine.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>

#include "vanetmac/channel.hpp"
#include "vanetmac/csma.hpp"
#include "vanetmac/mobility.hpp"
#include "vanetmac/rng.hpp"
#include "vanetmac/stdma.hpp"

namespace vanetmac {

Nanos mobility_tick_period(const ScenarioConfig& cfg) { return from_ms(cfg.mobility_tick); }

namespace {

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

struct NodeRuntime {
  CsmaNodeState csma;
  StdmaNodeState stdma;
  std::deque<PendingPacket> queue;  // STDMA messages awaiting a reserved slot
  int busy = 0;  // in-range transmissions currently on air
  std::uint64_t token = 0;
  int stats = -1;
};

struct Transmission {
  VehicleId sender = 0;
  RoadPoint at;
  std::vector<VehicleId> listeners;
  double nearest_concurrent = kInfinity;
  bool sampled = false;
};

struct SlotBatch {
  struct Sender {
    VehicleId id;
    RoadPoint at;
    bool in_stats;
  };
  AbsSlot slot = -1;
  std::vector<Sender> senders;
};

const char* action_name(SlotAction a) {
  switch (a) {
    case SlotAction::Keep: return "keep";
    case SlotAction::Reallocate: return "reallocate";
    case SlotAction::Steal: return "steal";
  }
  return "keep";
}

class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, std::uint64_t seed, const RunOptions& options)
      : cfg_(cfg),
        options_(options),
        seed_(seed),
        model_{cfg.sensing_range},
        end_(from_s(cfg.sim_duration)),
        warmup_(effective_warmup(cfg)),
        tick_(mobility_tick_period(cfg)),
        heartbeat_period_(from_s(1.0 / cfg.heartbeat_rate)),
        decode_time_(from_us(cfg.decode_time)),
        csma_(cfg.timing),
        backoff_rng_(make_stream(seed, "backoff")),
        stdma_rng_(make_stream(seed, "stdma-selection")),
        heartbeat_rng_(make_stream(seed, "heartbeat-offsets")),
        length_rng_(make_stream(seed, "packet-lengths")) {
    world_.road_length = cfg.road_length;
    const int lanes = cfg.lanes_per_direction * cfg.directions;
    for (int lane = 0; lane < lanes; ++lane) {
      arrival_rngs_.push_back(make_stream(seed, "arrivals", static_cast<std::uint64_t>(lane)));
      speed_rngs_.push_back(make_stream(seed, "speeds", static_cast<std::uint64_t>(lane)));
    }
    if (cfg.mac_protocol == MacProtocol::Stdma) {
      stdma_ = StdmaParams::from_config(cfg);
      first_counted_frame_ = (warmup_.count() + stdma_.frame.count() - 1) / stdma_.frame.count();
      end_frame_ = end_.count() / stdma_.frame.count();
    }
    report_.protocol = cfg.mac_protocol;
    report_.cell = cell_of(cfg);
    report_.seed = seed;
    ScenarioConfig seeded = cfg;
    seeded.rng_seed = seed;
    report_.config_hash = config_hash(seeded);
    report_.sim_duration_s = cfg.sim_duration;
    report_.heartbeat_rate = cfg.heartbeat_rate;
    report_.min_packets_for_extremes = cfg.min_packets_for_extremes;
    if (cfg.mac_protocol == MacProtocol::Stdma) report_.access_delay_bound = stdma_.access_delay_bound();
  }

  MetricsReport run() {
    for (int lane = 0; lane < static_cast<int>(arrival_rngs_.size()); ++lane) {
      push(schedule_next_arrival(cfg_, lane, Nanos{0}, arrival_rngs_[static_cast<std::size_t>(lane)]),
           EventKind::VehicleArrival, 0, static_cast<std::uint64_t>(lane));
    }
    push(tick_, EventKind::MobilityTick, 0, 0);

    Nanos last{0};
    while (true) {
      if (queue_.empty()) throw std::logic_error("event queue ran dry before the end of the simulation");
      const Event ev = queue_.top();
      if (ev.time >= end_) break;
      queue_.pop();
      if (ev.time < last) throw std::logic_error("event dispatched out of order");
      last = ev.time;
      dispatch(ev);
    }
    flush_batch();
    finish();
    return std::move(report_);
  }

 private:
  void push(Nanos t, EventKind kind, VehicleId node, std::uint64_t aux) { queue_.push(Event{t, seq_++, kind, node, aux}); }

  bool alive(VehicleId id) const { return world_.vehicles[id].alive; }
  bool collecting(Nanos now) const { return now >= warmup_; }

  NodeStats& stats_for(VehicleId id) {
    auto& n = nodes_[id];
    if (n.stats < 0) {
      n.stats = static_cast<int>(stats_.size());
      stats_.push_back(NodeStats{});
      stats_.back().node = id;
    }
    return stats_[static_cast<std::size_t>(n.stats)];
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::VehicleArrival: on_arrival(ev); break;
      case EventKind::HeartbeatGenerated: on_heartbeat(ev); break;
      case EventKind::AccessTimer: on_access_timer(ev); break;
      case EventKind::TransmissionEnd: on_transmission_end(ev); break;
      case EventKind::NetworkEntry: on_network_entry(ev); break;
      case EventKind::SlotReached: on_slot(ev); break;
      case EventKind::MobilityTick: on_tick(ev); break;
    }
  }

  // Mobility.

  void retire_exited(Nanos now) {
    for (auto id : advance(world_, now)) {
      auto& n = nodes_[id];
      ++n.token;
      n.stdma = StdmaNodeState{};
    }
  }

  // Rebuilds neighbour sets and moves ongoing transmissions onto the new
  // listener sets.
  void refresh_neighbors(Nanos now) {
    neighbors_.rebuild(world_, model_, cfg_.lane_width);
    marks_.resize(world_.vehicles.size(), 0);
    for (auto tx_id : active_) {
      auto& tx = transmissions_[tx_id];
      if (!alive(tx.sender)) continue;
      const auto& fresh = neighbors_.of(tx.sender);
      const auto before = ++stamp_;
      for (auto id : tx.listeners) marks_[id] = before;
      std::vector<VehicleId> added;
      for (auto id : fresh) {
        if (marks_[id] != before) added.push_back(id);
      }
      const auto after = ++stamp_;
      for (auto id : fresh) marks_[id] = after;
      std::vector<VehicleId> gone;
      for (auto id : tx.listeners) {
        if (marks_[id] != after) gone.push_back(id);
      }
      tx.listeners = fresh;
      for (auto id : gone) release_busy(id, now);
      for (auto id : added) add_busy(id, now);
    }
  }

  void on_arrival(const Event& ev) {
    const int lane = static_cast<int>(ev.aux);
    retire_exited(ev.time);
    const auto& v = spawn_vehicle(world_, cfg_, lane, ev.time, speed_rngs_[static_cast<std::size_t>(lane)], length_rng_);
    const auto id = v.id;
    nodes_.emplace_back();
    if (cfg_.mac_protocol == MacProtocol::Stdma) {
      nodes_.back().stdma = StdmaMac(stdma_, id).initial_state();
      push(stdma_.slot_start(stdma_.slot_at_or_after(ev.time + stdma_.frame)), EventKind::NetworkEntry, id, 0);
    }
    refresh_neighbors(ev.time);
    std::uniform_real_distribution<double> offset(0.0, cfg_.initial_tx_delay_max);
    push(ev.time + from_ms(offset(heartbeat_rng_)), EventKind::HeartbeatGenerated, id, 0);
    push(schedule_next_arrival(cfg_, lane, ev.time, arrival_rngs_[static_cast<std::size_t>(lane)]),
         EventKind::VehicleArrival, 0, static_cast<std::uint64_t>(lane));
  }

  void on_tick(const Event& ev) {
    const auto now = ev.time;
    retire_exited(now);
    refresh_neighbors(now);
    if (collecting(now)) {
      for (const auto& v : world_.vehicles) {
        if (!v.alive || !in_stats_region(v, cfg_)) continue;
        report_.neighbor_sum += static_cast<double>(neighbors_.of(v.id).size());
        ++report_.neighbor_samples;
      }
    }
    if (options_.vehicle_trace && now % options_.vehicle_trace_period == Nanos{0}) {
      for (const auto& v : world_.vehicles) {
        if (!v.alive) continue;
        *options_.vehicle_trace << to_s(now) << ',' << v.id << ',' << v.lane << ',' << v.position << '\n';
      }
    }
    push(now + tick_, EventKind::MobilityTick, 0, 0);
  }

  // Traffic.

  void on_heartbeat(const Event& ev) {
    const auto id = ev.node;
    if (!alive(id)) return;
    const auto now = ev.time;
    push(now + heartbeat_period_, EventKind::HeartbeatGenerated, id, 0);
    const bool counted = collecting(now) && in_stats_region(world_.vehicles[id], cfg_);
    const PendingPacket packet{now, counted};

    if (cfg_.mac_protocol == MacProtocol::Stdma) {
      auto& n = nodes_[id];
      // The application starts once the node holds a slot; until then the
      // node is only listening.
      if (n.stdma.phase != StdmaPhase::FirstFrame && n.stdma.phase != StdmaPhase::Continuous) return;
      count_generated(id, counted);
      n.queue.push_back(packet);
      return;
    }

    count_generated(id, counted);
    auto& n = nodes_[id];
    apply(id, csma_.on_packet_generated(n.csma, packet, now, n.busy > 0, backoff_rng_));
  }

  void count_generated(VehicleId id, bool counted) {
    ++report_.total_generated;
    if (counted) ++stats_for(id).generated;
  }

  void count_transmitted(VehicleId id, const PendingPacket& p, Nanos delay, const std::vector<VehicleId>& receivers) {
    ++report_.total_transmitted;
    if (!p.counted) return;
    stats_for(id).record_transmit(delay);
    if (receivers.empty()) return;
    const auto& from = neighbors_.point(id);
    double sum_us = 0.0;
    for (auto r : receivers) sum_us += to_us(mac_to_mac_delay(delay, distance(from, neighbors_.point(r)), decode_time_));
    const double mean_us = sum_us / static_cast<double>(receivers.size());
    auto& m = report_.mac_to_mac;
    ++m.messages;
    m.sum_mean_us += mean_us;
    if (mean_us <= to_us(kDeliveryDeadline)) ++m.within_deadline;
  }

  // CSMA.

  void apply(VehicleId id, const CsmaAction& a) {
    auto& n = nodes_[id];
    if (a.dropped) {
      ++report_.total_dropped;
      if (a.dropped->counted) stats_for(id).record_drop();
    }
    if (a.cancel_timer) ++n.token;
    if (a.schedule_timer) push(*a.schedule_timer, EventKind::AccessTimer, id, ++n.token);
  }

  void add_busy(VehicleId id, Nanos now) {
    auto& n = nodes_[id];
    if (n.busy++ == 0 && alive(id)) apply(id, csma_.on_channel_busy(n.csma, now, backoff_rng_));
  }

  void release_busy(VehicleId id, Nanos now) {
    auto& n = nodes_[id];
    if (--n.busy == 0 && alive(id)) apply(id, csma_.on_channel_idle(n.csma, now));
  }

  void on_access_timer(const Event& ev) {
    const auto id = ev.node;
    auto& n = nodes_[id];
    if (!alive(id) || ev.aux != n.token) return;
    const auto now = ev.time;
    const auto start = csma_.on_timer(n.csma, now);

    std::uint64_t tx_id;
    if (!free_tx_.empty()) {
      tx_id = free_tx_.back();
      free_tx_.pop_back();
    } else {
      tx_id = transmissions_.size();
      transmissions_.emplace_back();
    }
    auto& tx = transmissions_[tx_id];
    tx.sender = id;
    tx.at = neighbors_.point(id);
    tx.listeners = neighbors_.of(id);
    tx.nearest_concurrent = kInfinity;
    tx.sampled = collecting(now) && in_stats_region(world_.vehicles[id], cfg_);
    for (auto other : active_) {
      auto& o = transmissions_[other];
      const double d = distance(o.at, tx.at);
      o.nearest_concurrent = std::min(o.nearest_concurrent, d);
      tx.nearest_concurrent = std::min(tx.nearest_concurrent, d);
    }
    active_.push_back(tx_id);

    count_transmitted(id, start.packet, start.access_delay, tx.listeners);
    const auto listeners = tx.listeners;
    for (auto l : listeners) add_busy(l, now);
    push(now + transmit_duration_csma(world_.vehicles[id].packet_length, cfg_.timing), EventKind::TransmissionEnd, id,
         tx_id);
  }

  void on_transmission_end(const Event& ev) {
    const auto now = ev.time;
    const auto tx_id = ev.aux;
    active_.erase(std::find(active_.begin(), active_.end(), tx_id));
    auto& tx = transmissions_[tx_id];
    if (tx.sampled) report_.concurrent_tx_distances.push_back(tx.nearest_concurrent);
    const auto listeners = std::move(tx.listeners);
    tx.listeners.clear();
    free_tx_.push_back(tx_id);
    for (auto l : listeners) release_busy(l, now);

    const auto id = ev.node;
    if (!alive(id)) return;
    auto& n = nodes_[id];
    apply(id, csma_.on_transmission_end(n.csma, now, n.busy > 0, backoff_rng_));
  }

  // STDMA.

  void on_network_entry(const Event& ev) {
    const auto id = ev.node;
    if (!alive(id)) return;
    auto& n = nodes_[id];
    const StdmaMac mac(stdma_, id);
    mac.network_entry(n.stdma, stdma_.slot_at_or_after(ev.time), neighbors_.point(id), ev.time, stdma_rng_);
    push(stdma_.slot_start(n.stdma.reservations.front().next_use()), EventKind::SlotReached, id, 0);
  }

  void on_slot(const Event& ev) {
    const auto id = ev.node;
    if (!alive(id)) return;
    const auto now = ev.time;
    auto& n = nodes_[id];
    const StdmaMac mac(stdma_, id);
    const auto& own = neighbors_.point(id);
    const auto use = mac.on_slot(n.stdma, static_cast<std::size_t>(ev.aux), own, now, stdma_rng_);

    if (use.slot != batch_.slot) {
      flush_batch();
      batch_.slot = use.slot;
    }
    const bool in_stats = collecting(now) && in_stats_region(world_.vehicles[id], cfg_);
    batch_.senders.push_back({id, own, in_stats});

    const auto& receivers = neighbors_.of(id);
    if (!n.queue.empty()) {
      const auto packet = n.queue.front();
      n.queue.pop_front();
      const auto delay = now - packet.generated;
      report_.max_access_delay = std::max(report_.max_access_delay, delay);
      if (delay > report_.access_delay_bound) ++report_.delay_bound_violations;
      count_transmitted(id, packet, delay, receivers);
    } else {
      ++report_.repeat_transmissions;
    }
    const auto slot_index = use.slot % stdma_.n_slots;
    for (auto r : receivers) {
      nodes_[r].stdma.slot_map.record(slot_index, id, own, now, neighbors_.point(r));
    }

    if (collecting(now)) {
      if (use.action == SlotAction::Steal) ++report_.steals;
      if (use.action != SlotAction::Keep) ++report_.reallocations;
    }
    if (n.stdma.phase == StdmaPhase::Continuous && static_cast<int>(n.stdma.reservations.size()) != stdma_.report_rate) {
      ++report_.reservation_violations;
    }
    if (options_.slot_trace) {
      *options_.slot_trace << use.slot / stdma_.n_slots << ',' << id << ',' << slot_index << ',' << action_name(use.action)
                           << '\n';
    }

    push(stdma_.slot_start(use.next_use), EventKind::SlotReached, id, use.reservation);
    if (use.new_reservation) {
      push(stdma_.slot_start(n.stdma.reservations[*use.new_reservation].next_use()), EventKind::SlotReached, id,
           *use.new_reservation);
    }
  }

  void flush_batch() {
    if (batch_.slot < 0) return;
    const auto frame = batch_.slot / stdma_.n_slots;
    if (frame >= first_counted_frame_ && frame < end_frame_) {
      bool reused = false;
      const auto& s = batch_.senders;
      for (std::size_t i = 0; i < s.size(); ++i) {
        double nearest = kInfinity;
        for (std::size_t j = 0; j < s.size(); ++j) {
          if (i == j) continue;
          const double d = distance(s[i].at, s[j].at);
          if (d > cfg_.sensing_range) continue;
          nearest = std::min(nearest, d);
          if (s[i].in_stats || s[j].in_stats) reused = true;
        }
        if (s[i].in_stats && std::isfinite(nearest)) report_.slot_share_distances.push_back(nearest);
      }
      if (reused) ++report_.reused_slot_frames;
    }
    batch_.senders.clear();
    batch_.slot = -1;
  }

  void finish() {
    if (cfg_.mac_protocol == MacProtocol::Stdma) {
      report_.slot_frames = std::max<std::int64_t>(0, end_frame_ - first_counted_frame_) * stdma_.n_slots;
    }
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      const auto& n = nodes_[id];
      std::vector<PendingPacket> waiting(n.queue.begin(), n.queue.end());
      if (n.csma.pending) waiting.push_back(*n.csma.pending);
      if (n.csma.queued_behind_tx) waiting.push_back(*n.csma.queued_behind_tx);
      report_.total_pending += static_cast<std::int64_t>(waiting.size());
      for (const auto& p : waiting) {
        if (p.counted) ++stats_for(static_cast<VehicleId>(id)).pending;
      }
    }
    for (auto& s : stats_) s.close_runs();
    std::sort(stats_.begin(), stats_.end(), [](const NodeStats& a, const NodeStats& b) { return a.node < b.node; });
    std::erase_if(stats_, [](const NodeStats& s) { return s.generated == 0; });
    report_.nodes = std::move(stats_);
    if (report_.total_generated != report_.total_transmitted + report_.total_dropped + report_.total_pending) {
      throw std::logic_error("packet conservation violated");
    }
  }

  const ScenarioConfig& cfg_;
  const RunOptions& options_;
  std::uint64_t seed_;
  SensingModel model_;
  Nanos end_;
  Nanos warmup_;
  Nanos tick_;
  Nanos heartbeat_period_;
  Nanos decode_time_;
  CsmaMac csma_;
  StdmaParams stdma_;
  std::int64_t first_counted_frame_ = 0;
  std::int64_t end_frame_ = 0;

  Rng backoff_rng_;
  Rng stdma_rng_;
  Rng heartbeat_rng_;
  Rng length_rng_;
  std::vector<Rng> arrival_rngs_;
  std::vector<Rng> speed_rngs_;

  std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
  std::uint64_t seq_ = 0;

  World world_;
  NeighborTable neighbors_;
  std::vector<NodeRuntime> nodes_;
  std::vector<NodeStats> stats_;

  std::vector<Transmission> transmissions_;
  std::vector<std::uint64_t> active_;
  std::vector<std::uint64_t> free_tx_;
  std::vector<std::uint64_t> marks_;
  std::uint64_t stamp_ = 0;
  SlotBatch batch_;

  MetricsReport report_;
};

}  // namespace

MetricsReport run(const ScenarioConfig& cfg, std::uint64_t seed, const RunOptions& options) {
  validate(cfg);
  return Simulation(cfg, seed, options).run();
}

}  // namespace vanetmac
