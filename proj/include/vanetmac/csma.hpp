#pragma once

#include <optional>

#include "vanetmac/config.hpp"
#include "vanetmac/rng.hpp"
#include "vanetmac/time.hpp"

namespace vanetmac {

// 802.11p broadcast CSMA/CA for periodic heartbeats: one AIFS of listening,
// at most one backoff draw per packet, no ACKs, no contention-window
// doubling, and a waiting packet is discarded when the next one arrives.

enum class CsmaPhase { Idle, SensingAifs, Backoff, Transmitting };

struct PendingPacket {
  Nanos generated{0};
  bool counted = false;  // generated inside the stats window
};

struct CsmaNodeState {
  CsmaPhase phase = CsmaPhase::Idle;
  std::optional<PendingPacket> pending;
  /// A heartbeat that arrived while this node was on air; sensing for it
  /// starts when the transmission ends.
  std::optional<PendingPacket> queued_behind_tx;
  bool backoff_drawn = false;
  Nanos backoff_remaining{0};
  std::optional<Nanos> access_request_time;
  Nanos idle_since{0};
  Nanos timer_at = kNever;  // when the node will start transmitting if the channel stays idle
};

/// Effects a handler asks the event engine to carry out.
struct CsmaAction {
  std::optional<PendingPacket> dropped;
  bool cancel_timer = false;
  std::optional<Nanos> schedule_timer;
};

struct TransmitStart {
  PendingPacket packet;
  Nanos access_delay{0};
};

Nanos draw_backoff(Rng& rng, const TimingParams& t);

/// Drives one node's CSMA/CA procedure. Handlers are invoked by the engine on
/// heartbeat arrivals, per-node channel busy/idle transitions, timer expiry,
/// and the end of the node's own transmission.
class CsmaMac {
 public:
  explicit CsmaMac(const TimingParams& timing) : timing_(timing) {}

  CsmaAction on_packet_generated(CsmaNodeState& s, PendingPacket packet, Nanos now, bool channel_busy, Rng& rng) const;
  CsmaAction on_channel_busy(CsmaNodeState& s, Nanos now, Rng& rng) const;
  CsmaAction on_channel_idle(CsmaNodeState& s, Nanos now) const;
  /// The timer fired at `now`; the node goes on air.
  TransmitStart on_timer(CsmaNodeState& s, Nanos now) const;
  CsmaAction on_transmission_end(CsmaNodeState& s, Nanos now, bool channel_busy, Rng& rng) const;

  const TimingParams& timing() const { return timing_; }

 private:
  CsmaAction begin_access(CsmaNodeState& s, Nanos now, bool channel_busy, Rng& rng) const;
  TimingParams timing_;
};

}  // namespace vanetmac
