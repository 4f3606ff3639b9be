#include "vanetmac/csma.hpp"

#include <stdexcept>

namespace vanetmac {

Nanos draw_backoff(Rng& rng, const TimingParams& t) {
  std::uniform_int_distribution<int> k(0, t.cw_min);
  return t.slot_time * k(rng);
}

CsmaAction CsmaMac::begin_access(CsmaNodeState& s, Nanos now, bool channel_busy, Rng& rng) const {
  CsmaAction a;
  if (!channel_busy) {
    s.phase = CsmaPhase::SensingAifs;
    s.idle_since = now;
    s.timer_at = now + timing_.aifs;
    a.schedule_timer = s.timer_at;
  } else {
    s.phase = CsmaPhase::Backoff;
    s.backoff_drawn = true;
    s.backoff_remaining = draw_backoff(rng, timing_);
    s.timer_at = kNever;
  }
  return a;
}

CsmaAction CsmaMac::on_packet_generated(CsmaNodeState& s, PendingPacket packet, Nanos now, bool channel_busy,
                                        Rng& rng) const {
  CsmaAction a;
  if (s.phase == CsmaPhase::Transmitting) {
    if (s.queued_behind_tx) a.dropped = s.queued_behind_tx;
    s.queued_behind_tx = packet;
    return a;
  }
  if (s.pending) {
    a.dropped = s.pending;
    if (s.timer_at != kNever) a.cancel_timer = true;
  }
  s.pending = packet;
  s.access_request_time = packet.generated;
  s.backoff_drawn = false;
  s.backoff_remaining = Nanos{0};
  const auto started = begin_access(s, now, channel_busy, rng);
  a.schedule_timer = started.schedule_timer;
  return a;
}

CsmaAction CsmaMac::on_channel_busy(CsmaNodeState& s, Nanos now, Rng& rng) const {
  CsmaAction a;
  // A timer expiring at this very instant wins: simultaneous idle detection
  // produces a collision, never a deferral.
  if (s.timer_at == now) return a;

  if (s.phase == CsmaPhase::SensingAifs) {
    a.cancel_timer = true;
    s.timer_at = kNever;
    s.phase = CsmaPhase::Backoff;
    if (!s.backoff_drawn) {
      s.backoff_drawn = true;
      s.backoff_remaining = draw_backoff(rng, timing_);
    }
  } else if (s.phase == CsmaPhase::Backoff && s.timer_at != kNever) {
    a.cancel_timer = true;
    s.timer_at = kNever;
    // Count down only the whole slots that elapsed after a full idle AIFS.
    const Nanos counting = now - (s.idle_since + timing_.aifs);
    if (counting.count() > 0) {
      const auto slots = counting / timing_.slot_time;
      s.backoff_remaining -= timing_.slot_time * slots;
      if (s.backoff_remaining.count() < 0) s.backoff_remaining = Nanos{0};
    }
  }
  return a;
}

CsmaAction CsmaMac::on_channel_idle(CsmaNodeState& s, Nanos now) const {
  CsmaAction a;
  if (s.phase == CsmaPhase::Backoff && s.timer_at == kNever) {
    s.idle_since = now;
    s.timer_at = now + timing_.aifs + s.backoff_remaining;
    a.schedule_timer = s.timer_at;
  }
  return a;
}

TransmitStart CsmaMac::on_timer(CsmaNodeState& s, Nanos now) const {
  if (!s.pending || !s.access_request_time) throw std::logic_error("csma timer fired without a pending packet");
  TransmitStart tx{*s.pending, now - *s.access_request_time};
  s.phase = CsmaPhase::Transmitting;
  s.pending.reset();
  s.access_request_time.reset();
  s.backoff_drawn = false;
  s.backoff_remaining = Nanos{0};
  s.timer_at = kNever;
  return tx;
}

CsmaAction CsmaMac::on_transmission_end(CsmaNodeState& s, Nanos now, bool channel_busy, Rng& rng) const {
  s.phase = CsmaPhase::Idle;
  if (!s.queued_behind_tx) return {};
  s.pending = s.queued_behind_tx;
  s.queued_behind_tx.reset();
  s.access_request_time = s.pending->generated;
  return begin_access(s, now, channel_busy, rng);
}

}  // namespace vanetmac
