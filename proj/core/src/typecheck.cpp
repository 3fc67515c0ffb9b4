#include "cvlab/typecheck.hpp"

#include <algorithm>
#include <map>

namespace cvlab {

namespace {

std::optional<EventId> first_missing(const std::set<EventId>& have, const std::set<EventId>& need) {
  for (const EventId& e : need) {
    if (!have.contains(e)) return e;
  }
  return std::nullopt;
}

Witness region_witness(Tick t, WitnessKind kind, std::vector<Box> boxes) {
  Witness w;
  w.tick = t;
  w.kind = kind;
  w.region = Region(std::move(boxes));
  return w;
}

Witness event_witness(Tick t, EventId event) {
  Witness w;
  w.tick = t;
  w.kind = WitnessKind::Event;
  w.event = std::move(event);
  return w;
}

Tick shared_horizon(const BehaviorType& a, const BehaviorType& b, Tick horizon) {
  if (horizon > a.horizon || horizon > b.horizon) {
    throw HorizonError("check horizon " + std::to_string(horizon) + " exceeds the horizon of '" +
                       (horizon > a.horizon ? a.id : b.id) + "'");
  }
  return horizon;
}

}  // namespace

std::string_view to_string(VerdictStatus status) noexcept {
  return status == VerdictStatus::Pass ? "pass" : "fail";
}

std::string_view to_string(WitnessKind kind) noexcept {
  switch (kind) {
    case WitnessKind::Occupancy: return "occupancy";
    case WitnessKind::Sensor: return "sensor";
    case WitnessKind::Event: return "event";
  }
  return "unknown";
}

Verdict Verdict::pass(std::string explanation) { return Verdict{VerdictStatus::Pass, std::nullopt, std::move(explanation)}; }

Verdict Verdict::fail(Witness witness, std::string explanation) {
  return Verdict{VerdictStatus::Fail, std::move(witness), std::move(explanation)};
}

Verdict conforms(const Trace& trace, const BehaviorType& bt, Tick horizon) {
  if (horizon > bt.horizon) throw HorizonError("conformance horizon exceeds the horizon of '" + bt.id + "'");
  for (const TraceRecord& r : trace.records) {
    if (r.tick > horizon) {
      throw HorizonError("trace '" + trace.component + "' has a record at tick " + std::to_string(r.tick) +
                         " beyond horizon " + std::to_string(horizon));
    }
    const std::string at = " at tick " + std::to_string(r.tick);
    if (auto extra = uncovered_boxes(r.occupied, occupancy_at(bt, r.tick)); !extra.empty()) {
      return Verdict::fail(region_witness(r.tick, WitnessKind::Occupancy, std::move(extra)),
                           "'" + trace.component + "' occupies space outside '" + bt.id + "'" + at);
    }
    if (auto extra = uncovered_boxes(r.sensed, sensor_coverage_at(bt, r.tick)); !extra.empty()) {
      return Verdict::fail(region_witness(r.tick, WitnessKind::Sensor, std::move(extra)),
                           "'" + trace.component + "' senses outside the coverage of '" + bt.id + "'" + at);
    }
    if (auto e = first_missing(events_at(bt, r.tick), r.events)) {
      return Verdict::fail(event_witness(r.tick, *e),
                           "'" + trace.component + "' emits '" + *e + "' not permitted by '" + bt.id + "'" + at);
    }
  }
  return Verdict::pass("'" + trace.component + "' conforms to '" + bt.id + "'");
}

Verdict refines(const BehaviorType& sub, const BehaviorType& super, Tick horizon) {
  shared_horizon(sub, super, horizon);
  for (Tick t = 0;; ++t) {
    const std::string at = " at tick " + std::to_string(t);
    if (auto extra = uncovered_boxes(occupancy_at(sub, t), occupancy_at(super, t)); !extra.empty()) {
      return Verdict::fail(region_witness(t, WitnessKind::Occupancy, std::move(extra)),
                           "'" + sub.id + "' occupies space outside '" + super.id + "'" + at);
    }
    if (auto lost = uncovered_boxes(sensor_coverage_at(super, t), sensor_coverage_at(sub, t)); !lost.empty()) {
      return Verdict::fail(region_witness(t, WitnessKind::Sensor, std::move(lost)),
                           "'" + sub.id + "' loses sensor coverage of '" + super.id + "'" + at);
    }
    if (auto e = first_missing(events_at(sub, t), events_at(super, t))) {
      return Verdict::fail(event_witness(t, *e), "'" + sub.id + "' does not emit '" + *e + "'" + at);
    }
    if (t == horizon) break;
  }
  return Verdict::pass("'" + sub.id + "' refines '" + super.id + "'");
}

Verdict compatible(const BehaviorType& a, const BehaviorType& b, Tick horizon) {
  shared_horizon(a, b, horizon);
  for (Tick t = 0;; ++t) {
    const Region overlap = positive_volume_overlap(occupancy_at(a, t), occupancy_at(b, t));
    if (!overlap.empty()) {
      Witness w;
      w.tick = t;
      w.kind = WitnessKind::Occupancy;
      w.region = overlap;
      w.components = {a.id, b.id};
      return Verdict::fail(std::move(w),
                           "'" + a.id + "' and '" + b.id + "' collide at tick " + std::to_string(t));
    }
    if (t == horizon) break;
  }
  return Verdict::pass("'" + a.id + "' and '" + b.id + "' never collide");
}

BehaviorType compose(std::span<const PlacedPart> parts, std::string composite_id) {
  if (parts.empty()) throw InvariantViolation("compose needs at least one part", composite_id);

  std::vector<BehaviorType> placed;
  placed.reserve(parts.size());
  Tick horizon = parts.front().behavior.horizon;
  for (const PlacedPart& p : parts) {
    placed.push_back(translate_bt(p.behavior, p.offset));
    horizon = std::min(horizon, p.behavior.horizon);
  }

  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (std::size_t j = i + 1; j < placed.size(); ++j) {
      Verdict v = compatible(placed[i], placed[j], horizon);
      if (!v.passed()) {
        throw IncompatibleParts("parts " + std::to_string(i) + " and " + std::to_string(j) + " of '" +
                                    composite_id + "' collide: " + v.explanation,
                                std::move(v));
      }
    }
  }

  // Every tick where any part switches mode starts a composite segment.
  std::set<Tick> starts;
  for (const BehaviorType& bt : placed) {
    for (const ModeSegment& s : bt.schedule) {
      if (s.start <= horizon) starts.insert(s.start);
    }
  }

  BehaviorType out;
  out.id = std::move(composite_id);
  out.horizon = horizon;
  std::map<ModeName, std::vector<ModeName>> tuples;
  for (Tick start : starts) {
    std::vector<ModeName> tuple;
    ModeName label = "(";
    for (std::size_t i = 0; i < placed.size(); ++i) {
      tuple.push_back(placed[i].mode_at(start));
      label += (i == 0 ? "" : ",") + tuple.back();
    }
    label += ")";
    if (out.schedule.empty() || out.schedule.back().mode != label) out.schedule.push_back({start, label});
    out.modes.insert(label);
    tuples.emplace(label, std::move(tuple));
  }

  for (std::size_t i = 0; i < placed.size(); ++i) {
    for (const Clause& c : placed[i].clauses) {
      std::set<ModeName> modes;
      for (const auto& [label, tuple] : tuples) {
        if (c.guard.modes.contains(tuple[i])) modes.insert(label);
      }
      if (modes.empty()) continue;  // the clause can never fire within the horizon
      Clause moved{Guard{c.guard.ticks, std::move(modes)}, c.effect};
      std::visit(
          [&](auto& e) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(e)>, Emits>) e.region = e.region.translated(placed[i].frame);
          },
          moved.effect);
      out.clauses.push_back(std::move(moved));
    }
  }
  return out;
}

}  // namespace cvlab
