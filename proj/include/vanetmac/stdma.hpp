#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "vanetmac/channel.hpp"
#include "vanetmac/rng.hpp"
#include "vanetmac/time.hpp"

namespace vanetmac {

// Self-organising TDMA. Time is divided into globally synchronised frames of
// `n_slots` equal slots; each node reserves `report_rate` slots per frame,
// spaced roughly one nominal increment (NI) apart, and picks each actual
// transmission slot (NTS) inside a selection interval (SI) around its
// nominal slot.

using SlotIndex = std::int64_t;  // position inside a frame, 0 .. n_slots-1
using AbsSlot = std::int64_t;    // frame * n_slots + slot index

inline constexpr VehicleId kNoOwner = std::numeric_limits<VehicleId>::max();

/// One node's perceived slot occupancy. Entries heard more than one frame ago
/// read as free; slots reserved by the node itself never age.
class SlotMap {
 public:
  struct Entry {
    VehicleId owner = kNoOwner;
    RoadPoint owner_position;
    Nanos heard{0};
    bool own = false;
  };

  SlotMap() = default;
  SlotMap(SlotIndex n_slots, Nanos frame) : frame_(frame), entries_(static_cast<std::size_t>(n_slots)) {}

  SlotIndex size() const { return static_cast<SlotIndex>(entries_.size()); }
  const Entry& at(SlotIndex i) const { return entries_[static_cast<std::size_t>(i)]; }

  bool is_free(SlotIndex i, Nanos now) const;
  /// Heard `owner` transmitting in slot `i`. Two senders heard in the same
  /// slot at the same instant resolve to the one nearer `observer`.
  void record(SlotIndex i, VehicleId owner, const RoadPoint& owner_position, Nanos now, const RoadPoint& observer);
  void mark_own(SlotIndex i, VehicleId self, const RoadPoint& position, Nanos now);
  void release_own(SlotIndex i);

 private:
  Nanos frame_{0};
  std::vector<Entry> entries_;
};

/// Contiguous window of `width` slots around `center`, wrapping modulo
/// n_slots. An even width puts the extra slot after the centre.
struct SelectionInterval {
  SlotIndex center = 0;
  SlotIndex width = 1;
  SlotIndex n_slots = 1;

  SlotIndex first_offset() const { return -((width - 1) / 2); }
  SlotIndex last_offset() const { return first_offset() + width - 1; }
  SlotIndex slot_at_offset(SlotIndex offset) const;
  std::vector<SlotIndex> window() const;
};

SlotIndex nominal_increment(SlotIndex n_slots, int report_rate);
SlotIndex selection_width(SlotIndex ni);

struct NtsChoice {
  SlotIndex offset = 0;  // relative to the SI centre
  SlotIndex slot = 0;
  std::optional<VehicleId> stolen_from;
};

/// Slot selection: a uniformly drawn candidate if free, else the nearest free
/// slot in the window (ties broken at random), else the slot whose owner was
/// last heard farthest from `own_position` (ties: lowest owner id).
NtsChoice select_nts(const SelectionInterval& si, const SlotMap& map, const RoadPoint& own_position, Nanos now,
                     Rng& rng);

enum class StdmaPhase { Initialization, NetworkEntry, FirstFrame, Continuous };
enum class SlotAction { Keep, Reallocate, Steal };

struct Reservation {
  AbsSlot anchor = 0;  // nominal slot of the frame in which this reservation is next used
  SlotIndex offset = 0;  // NTS relative to the anchor, inside the SI
  int n_remaining = 0;

  AbsSlot next_use() const { return anchor + offset; }
};

struct StdmaNodeState {
  StdmaPhase phase = StdmaPhase::Initialization;
  AbsSlot nss = 0;
  std::vector<Reservation> reservations;
  SlotMap slot_map;
};

struct StdmaParams {
  SlotIndex n_slots = 0;
  Nanos slot_duration{0};
  Nanos frame{0};
  int report_rate = 1;

  static StdmaParams from_config(const ScenarioConfig& cfg);
  SlotIndex ni() const { return nominal_increment(n_slots, report_rate); }
  SlotIndex si_width() const { return selection_width(ni()); }
  Nanos slot_start(AbsSlot a) const;
  /// First slot starting at or after `t`.
  AbsSlot slot_at_or_after(Nanos t) const;
  /// Upper bound on any packet's channel access delay.
  Nanos access_delay_bound() const { return frame + slot_duration * ni(); }
};

/// What happened at one reserved slot.
struct SlotUse {
  AbsSlot slot = 0;
  std::size_t reservation = 0;
  SlotAction action = SlotAction::Keep;
  std::optional<VehicleId> stolen_from;
  AbsSlot next_use = 0;
  /// Set during the first frame when the next reservation has been placed.
  std::optional<std::size_t> new_reservation;
};

class StdmaMac {
 public:
  StdmaMac(StdmaParams params, VehicleId self) : p_(params), self_(self) {}

  StdmaNodeState initial_state() const;

  /// Called at the slot boundary `current` after one frame of listening.
  /// Places the first reservation; the node moves to FirstFrame.
  void network_entry(StdmaNodeState& s, AbsSlot current, const RoadPoint& own, Nanos now, Rng& rng) const;

  /// The node has reached the NTS of reservation `index`.
  SlotUse on_slot(StdmaNodeState& s, std::size_t index, const RoadPoint& own, Nanos now, Rng& rng) const;

  const StdmaParams& params() const { return p_; }

 private:
  SelectionInterval si_around(AbsSlot anchor) const;
  int draw_reuse(Rng& rng) const;

  StdmaParams p_;
  VehicleId self_;
};

}  // namespace vanetmac
