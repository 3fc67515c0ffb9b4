#pragma once

// Spatial behavioral types: guarded clause sets over discrete ticks and a
// fixed mode schedule, and traces as their observable counterpart.

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cvlab/geometry.hpp"

namespace cvlab {

using Tick = std::uint32_t;
using ModeName = std::string;
using EventId = std::string;

/// Closed tick interval [first, last].
struct TickInterval {
  Tick first = 0;
  Tick last = 0;

  bool contains(Tick t) const noexcept { return first <= t && t <= last; }
  friend auto operator<=>(const TickInterval&, const TickInterval&) = default;
};

struct Occupy {
  Region region;
  friend bool operator==(const Occupy&, const Occupy&) = default;
};

struct SensorCoverage {
  Region region;
  friend bool operator==(const SensorCoverage&, const SensorCoverage&) = default;
};

struct Emits {
  EventId event;
  friend bool operator==(const Emits&, const Emits&) = default;
};

using Effect = std::variant<Occupy, SensorCoverage, Emits>;

struct Guard {
  TickInterval ticks;
  std::set<ModeName> modes;

  friend bool operator==(const Guard&, const Guard&) = default;
};

/// "While the guard holds, the effect holds."
struct Clause {
  Guard guard;
  Effect effect;

  friend bool operator==(const Clause&, const Clause&) = default;
};

/// The mode in force from `start` until the next segment starts.
struct ModeSegment {
  Tick start = 0;
  ModeName mode;

  friend bool operator==(const ModeSegment&, const ModeSegment&) = default;
};

/// A spatial behavioral type. Clause regions are in the type's local frame;
/// queries translate them by `frame`. The schedule covers [0, horizon].
struct BehaviorType {
  std::string id;
  std::set<ModeName> modes;
  std::vector<ModeSegment> schedule;
  std::vector<Clause> clauses;
  Vec3 frame{};
  Tick horizon = 0;

  /// A type with one mode ("run") scheduled over the whole horizon.
  static BehaviorType single_mode(std::string id, Tick horizon, ModeName mode = "run");

  // Convenience builders; an empty mode set means "every declared mode".
  BehaviorType& occupy(TickInterval ticks, Region region, std::set<ModeName> modes = {});
  BehaviorType& sense(TickInterval ticks, Region region, std::set<ModeName> modes = {});
  BehaviorType& emit(TickInterval ticks, EventId event, std::set<ModeName> modes = {});

  /// Throws InvariantViolation describing the first broken invariant.
  void validate() const;

  /// Throws HorizonError when t > horizon.
  const ModeName& mode_at(Tick t) const;

  friend bool operator==(const BehaviorType&, const BehaviorType&) = default;
};

/// Union of the Occupy regions of all clauses firing at t, in world coordinates.
Region occupancy_at(const BehaviorType& bt, Tick t);
/// Same as occupancy_at, over SensorCoverage effects.
Region sensor_coverage_at(const BehaviorType& bt, Tick t);
/// Events of all Emits clauses firing at t.
std::set<EventId> events_at(const BehaviorType& bt, Tick t);

/// Shifts the frame; throws OverflowError if any placed coordinate overflows.
BehaviorType translate_bt(const BehaviorType& bt, const Vec3& offset);

struct TraceRecord {
  Tick tick = 0;
  Region occupied;
  Region sensed;
  std::set<EventId> events;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

/// Per-tick observable behavior of one component.
struct Trace {
  std::string component;
  std::vector<TraceRecord> records;

  /// Throws InvariantViolation unless ticks are strictly increasing.
  void validate() const;
  /// The record for tick t, or nullptr.
  const TraceRecord* at(Tick t) const;
  Trace translated(const Vec3& offset) const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// One record per tick in [0, horizon]. Throws HorizonError if horizon > bt.horizon.
Trace execute_bt(const BehaviorType& bt, Tick horizon);

/// The tightest type describing `trace`: each record becomes clauses guarded
/// by its own tick. Ticks without a record occupy nothing.
BehaviorType bt_from_trace(const Trace& trace, Tick horizon);

}  // namespace cvlab
