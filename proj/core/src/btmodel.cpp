#include "cvlab/btmodel.hpp"

#include <algorithm>
#include <utility>

#include "cvlab/error.hpp"

namespace cvlab {

namespace {

bool fires(const Clause& c, Tick t, const ModeName& mode) {
  return c.guard.ticks.contains(t) && c.guard.modes.contains(mode);
}

void check_horizon(const BehaviorType& bt, Tick t) {
  if (t > bt.horizon) {
    throw HorizonError("tick " + std::to_string(t) + " is beyond horizon " + std::to_string(bt.horizon) +
                       " of behavior '" + bt.id + "'");
  }
}

template <typename EffectT>
Region collect_regions(const BehaviorType& bt, Tick t) {
  check_horizon(bt, t);
  const ModeName& mode = bt.mode_at(t);
  std::vector<Region> parts;
  for (const Clause& c : bt.clauses) {
    if (const auto* e = std::get_if<EffectT>(&c.effect); e != nullptr && fires(c, t, mode)) {
      parts.push_back(e->region.translated(bt.frame));
    }
  }
  return region_union(parts);
}

}  // namespace

BehaviorType BehaviorType::single_mode(std::string id, Tick horizon, ModeName mode) {
  BehaviorType bt;
  bt.id = std::move(id);
  bt.modes = {mode};
  bt.schedule = {ModeSegment{0, std::move(mode)}};
  bt.horizon = horizon;
  return bt;
}

BehaviorType& BehaviorType::occupy(TickInterval ticks, Region region, std::set<ModeName> guard_modes) {
  clauses.push_back({Guard{ticks, guard_modes.empty() ? modes : std::move(guard_modes)}, Occupy{std::move(region)}});
  return *this;
}

BehaviorType& BehaviorType::sense(TickInterval ticks, Region region, std::set<ModeName> guard_modes) {
  clauses.push_back(
      {Guard{ticks, guard_modes.empty() ? modes : std::move(guard_modes)}, SensorCoverage{std::move(region)}});
  return *this;
}

BehaviorType& BehaviorType::emit(TickInterval ticks, EventId event, std::set<ModeName> guard_modes) {
  clauses.push_back({Guard{ticks, guard_modes.empty() ? modes : std::move(guard_modes)}, Emits{std::move(event)}});
  return *this;
}

void BehaviorType::validate() const {
  const std::string where = "behavior '" + id + "'";
  if (modes.empty()) throw InvariantViolation("mode set is empty", where);
  if (schedule.empty() || schedule.front().start != 0) {
    throw InvariantViolation("mode schedule must start at tick 0", where);
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!modes.contains(schedule[i].mode)) {
      throw InvariantViolation("schedule uses undeclared mode '" + schedule[i].mode + "'", where);
    }
    if (i > 0 && schedule[i].start <= schedule[i - 1].start) {
      throw InvariantViolation("schedule segments must start at strictly increasing ticks", where);
    }
  }
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const Clause& c = clauses[i];
    const std::string at = where + " clause " + std::to_string(i);
    if (c.guard.ticks.first > c.guard.ticks.last) throw InvariantViolation("guard interval has first > last", at);
    if (c.guard.modes.empty()) throw InvariantViolation("guard mode set is empty", at);
    for (const ModeName& m : c.guard.modes) {
      if (!modes.contains(m)) throw InvariantViolation("guard uses undeclared mode '" + m + "'", at);
    }
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, Emits>) {
            if (e.event.empty()) throw InvariantViolation("event identifier is empty", at);
          } else {
            if (e.region.empty()) throw InvariantViolation("effect region is empty", at);
          }
        },
        c.effect);
  }
}

const ModeName& BehaviorType::mode_at(Tick t) const {
  check_horizon(*this, t);
  if (schedule.empty()) throw InvariantViolation("mode schedule is empty", "behavior '" + id + "'");
  auto it = std::upper_bound(schedule.begin(), schedule.end(), t,
                             [](Tick tick, const ModeSegment& s) { return tick < s.start; });
  if (it == schedule.begin()) throw InvariantViolation("mode schedule must start at tick 0", "behavior '" + id + "'");
  return std::prev(it)->mode;
}

Region occupancy_at(const BehaviorType& bt, Tick t) { return collect_regions<Occupy>(bt, t); }

Region sensor_coverage_at(const BehaviorType& bt, Tick t) { return collect_regions<SensorCoverage>(bt, t); }

std::set<EventId> events_at(const BehaviorType& bt, Tick t) {
  check_horizon(bt, t);
  const ModeName& mode = bt.mode_at(t);
  std::set<EventId> out;
  for (const Clause& c : bt.clauses) {
    if (const auto* e = std::get_if<Emits>(&c.effect); e != nullptr && fires(c, t, mode)) out.insert(e->event);
  }
  return out;
}

BehaviorType translate_bt(const BehaviorType& bt, const Vec3& offset) {
  BehaviorType out = bt;
  out.frame = checked_add(bt.frame, offset);
  // Placed coordinates must stay representable too, not just the frame.
  for (const Clause& c : out.clauses) {
    std::visit(
        [&](const auto& e) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(e)>, Emits>) (void)e.region.translated(out.frame);
        },
        c.effect);
  }
  return out;
}

void Trace::validate() const {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].tick <= records[i - 1].tick) {
      throw InvariantViolation("trace ticks must be strictly increasing", "trace '" + component + "'");
    }
  }
}

const TraceRecord* Trace::at(Tick t) const {
  auto it = std::lower_bound(records.begin(), records.end(), t,
                             [](const TraceRecord& r, Tick tick) { return r.tick < tick; });
  return (it != records.end() && it->tick == t) ? &*it : nullptr;
}

Trace Trace::translated(const Vec3& offset) const {
  Trace out{component, {}};
  out.records.reserve(records.size());
  for (const TraceRecord& r : records) {
    out.records.push_back({r.tick, r.occupied.translated(offset), r.sensed.translated(offset), r.events});
  }
  return out;
}

Trace execute_bt(const BehaviorType& bt, Tick horizon) {
  check_horizon(bt, horizon);
  Trace trace{bt.id, {}};
  trace.records.reserve(static_cast<std::size_t>(horizon) + 1);
  for (Tick t = 0;; ++t) {
    trace.records.push_back({t, occupancy_at(bt, t), sensor_coverage_at(bt, t), events_at(bt, t)});
    if (t == horizon) break;
  }
  return trace;
}

BehaviorType bt_from_trace(const Trace& trace, Tick horizon) {
  BehaviorType bt = BehaviorType::single_mode(trace.component, horizon, "trace");
  for (const TraceRecord& r : trace.records) {
    if (r.tick > horizon) break;
    const TickInterval at{r.tick, r.tick};
    if (!r.occupied.empty()) bt.occupy(at, r.occupied);
    if (!r.sensed.empty()) bt.sense(at, r.sensed);
    for (const EventId& e : r.events) bt.emit(at, e);
  }
  return bt;
}

}  // namespace cvlab
