#include "vanetmac/stdma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vanetmac {

namespace {
SlotIndex wrap(SlotIndex i, SlotIndex n) { return ((i % n) + n) % n; }
}  // namespace

bool SlotMap::is_free(SlotIndex i, Nanos now) const {
  const auto& e = at(i);
  if (e.own) return false;
  return e.owner == kNoOwner || now - e.heard > frame_;
}

void SlotMap::record(SlotIndex i, VehicleId owner, const RoadPoint& owner_position, Nanos now,
                     const RoadPoint& observer) {
  auto& e = entries_[static_cast<std::size_t>(i)];
  if (e.own) return;
  if (e.owner != kNoOwner && e.owner != owner && e.heard == now &&
      distance(e.owner_position, observer) <= distance(owner_position, observer)) {
    return;
  }
  e.owner = owner;
  e.owner_position = owner_position;
  e.heard = now;
}

void SlotMap::mark_own(SlotIndex i, VehicleId self, const RoadPoint& position, Nanos now) {
  auto& e = entries_[static_cast<std::size_t>(i)];
  e = Entry{self, position, now, true};
}

void SlotMap::release_own(SlotIndex i) { entries_[static_cast<std::size_t>(i)] = Entry{}; }

SlotIndex SelectionInterval::slot_at_offset(SlotIndex offset) const { return wrap(center + offset, n_slots); }

std::vector<SlotIndex> SelectionInterval::window() const {
  std::vector<SlotIndex> w;
  w.reserve(static_cast<std::size_t>(width));
  for (auto off = first_offset(); off <= last_offset(); ++off) w.push_back(slot_at_offset(off));
  return w;
}

SlotIndex nominal_increment(SlotIndex n_slots, int report_rate) {
  if (report_rate <= 0 || report_rate > n_slots) throw std::invalid_argument("report rate must be in [1, n_slots]");
  return n_slots / report_rate;
}

SlotIndex selection_width(SlotIndex ni) {
  return std::max<SlotIndex>(1, static_cast<SlotIndex>(std::llround(0.2 * static_cast<double>(ni))));
}

NtsChoice select_nts(const SelectionInterval& si, const SlotMap& map, const RoadPoint& own_position, Nanos now,
                     Rng& rng) {
  if (si.width <= 0) throw std::invalid_argument("empty selection interval");
  const auto lo = si.first_offset();
  const auto hi = si.last_offset();
  std::uniform_int_distribution<SlotIndex> pick(lo, hi);
  const auto candidate = pick(rng);
  auto free_at = [&](SlotIndex off) { return map.is_free(si.slot_at_offset(off), now); };

  if (free_at(candidate)) return {candidate, si.slot_at_offset(candidate), std::nullopt};

  for (SlotIndex d = 1; d <= hi - lo; ++d) {
    const bool below = candidate - d >= lo && free_at(candidate - d);
    const bool above = candidate + d <= hi && free_at(candidate + d);
    if (below && above) {
      std::bernoulli_distribution coin(0.5);
      const auto off = coin(rng) ? candidate + d : candidate - d;
      return {off, si.slot_at_offset(off), std::nullopt};
    }
    if (below) return {candidate - d, si.slot_at_offset(candidate - d), std::nullopt};
    if (above) return {candidate + d, si.slot_at_offset(candidate + d), std::nullopt};
  }

  // Every slot is taken: reuse the one whose owner is farthest away.
  std::optional<SlotIndex> best;
  double best_distance = -1.0;
  VehicleId best_owner = kNoOwner;
  for (auto off = lo; off <= hi; ++off) {
    const auto& e = map.at(si.slot_at_offset(off));
    if (e.own) continue;
    const double d = distance(e.owner_position, own_position);
    if (d > best_distance || (d == best_distance && e.owner < best_owner)) {
      best = off;
      best_distance = d;
      best_owner = e.owner;
    }
  }
  if (!best) return {candidate, si.slot_at_offset(candidate), std::nullopt};
  return {*best, si.slot_at_offset(*best), best_owner};
}

StdmaParams StdmaParams::from_config(const ScenarioConfig& cfg) {
  StdmaParams p;
  p.frame = from_s(cfg.stdma_frame_duration);
  p.slot_duration = stdma_slot_duration(longest_packet(cfg), cfg.timing);
  p.n_slots = slots_per_frame(p.frame, p.slot_duration);
  p.report_rate = vanetmac::report_rate(cfg);
  return p;
}

Nanos StdmaParams::slot_start(AbsSlot a) const {
  const auto frame_index = a / n_slots;
  const auto idx = a % n_slots;
  return frame * frame_index + slot_duration * idx;
}

AbsSlot StdmaParams::slot_at_or_after(Nanos t) const {
  const auto frame_index = t / frame;
  const auto into = t - frame * frame_index;
  auto idx = (into.count() + slot_duration.count() - 1) / slot_duration.count();
  if (idx >= n_slots) return (frame_index + 1) * n_slots;
  return frame_index * n_slots + idx;
}

StdmaNodeState StdmaMac::initial_state() const {
  StdmaNodeState s;
  s.slot_map = SlotMap(p_.n_slots, p_.frame);
  return s;
}

SelectionInterval StdmaMac::si_around(AbsSlot anchor) const { return {wrap(anchor, p_.n_slots), p_.si_width(), p_.n_slots}; }

int StdmaMac::draw_reuse(Rng& rng) const {
  std::uniform_int_distribution<int> n(3, 8);
  return n(rng);
}

void StdmaMac::network_entry(StdmaNodeState& s, AbsSlot current, const RoadPoint& own, Nanos now, Rng& rng) const {
  s.phase = StdmaPhase::NetworkEntry;
  const auto ni = p_.ni();
  const SelectionInterval shape{0, p_.si_width(), p_.n_slots};
  // Keep the whole first SI inside [current, current + ni - 1) so the first
  // transmission lands within one nominal increment of entry.
  const auto lo = current - shape.first_offset();
  const auto hi = std::max(lo, current + ni - 2 - shape.last_offset());
  std::uniform_int_distribution<AbsSlot> start(lo, hi);
  s.nss = start(rng);

  const auto si = si_around(s.nss);
  const auto choice = select_nts(si, s.slot_map, own, now, rng);
  s.slot_map.mark_own(choice.slot, self_, own, now);
  s.reservations.clear();
  s.reservations.push_back({s.nss, choice.offset, draw_reuse(rng)});
  s.phase = StdmaPhase::FirstFrame;
}

SlotUse StdmaMac::on_slot(StdmaNodeState& s, std::size_t index, const RoadPoint& own, Nanos now, Rng& rng) const {
  if (s.phase != StdmaPhase::FirstFrame && s.phase != StdmaPhase::Continuous) {
    throw std::logic_error("stdma slot reached before network entry");
  }
  auto& r = s.reservations.at(index);
  SlotUse use;
  use.slot = r.next_use();
  use.reservation = index;
  s.slot_map.mark_own(wrap(use.slot, p_.n_slots), self_, own, now);

  if (--r.n_remaining <= 0) {
    // Move to a different slot of the original SI, then give up the old one.
    const auto choice = select_nts(si_around(r.anchor), s.slot_map, own, now, rng);
    s.slot_map.release_own(wrap(use.slot, p_.n_slots));
    s.slot_map.mark_own(choice.slot, self_, own, now);
    use.action = choice.stolen_from ? SlotAction::Steal : SlotAction::Reallocate;
    use.stolen_from = choice.stolen_from;
    r.offset = choice.offset;
    r.n_remaining = draw_reuse(rng);
  }
  r.anchor += p_.n_slots;
  use.next_use = r.next_use();

  if (s.phase == StdmaPhase::FirstFrame) {
    if (static_cast<int>(s.reservations.size()) < p_.report_rate) {
      const auto anchor = s.nss + p_.ni() * static_cast<AbsSlot>(s.reservations.size());
      const auto choice = select_nts(si_around(anchor), s.slot_map, own, now, rng);
      s.slot_map.mark_own(choice.slot, self_, own, now);
      s.reservations.push_back({anchor, choice.offset, draw_reuse(rng)});
      use.new_reservation = s.reservations.size() - 1;
      if (choice.stolen_from && !use.stolen_from) use.stolen_from = choice.stolen_from;
    } else {
      s.phase = StdmaPhase::Continuous;
    }
  }
  return use;
}

}  // namespace vanetmac
