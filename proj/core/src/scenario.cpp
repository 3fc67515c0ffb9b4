#include "cvlab/scenario.hpp"

#include <algorithm>
#include <map>

#include "cvlab/error.hpp"
#include "cvlab/simulate.hpp"

namespace cvlab {

namespace {

std::string indexed(std::string_view field, std::size_t i) {
  return std::string(field) + "[" + std::to_string(i) + "]";
}

template <typename T, typename Key>
const T* find_by(const std::vector<T>& items, std::string_view id, Key key) {
  auto it = std::find_if(items.begin(), items.end(), [&](const T& x) { return key(x) == id; });
  return it == items.end() ? nullptr : &*it;
}

void check_identifier(const std::string& id, const std::string& where) {
  if (id.empty()) throw InvariantViolation("identifier is empty", where);
  if (id.find('#') != std::string::npos) {
    throw InvariantViolation("identifier '" + id + "' contains '#', which is reserved for replicas", where);
  }
}

void check_intervals(const std::vector<TickInterval>& ticks, Tick horizon, const std::string& where) {
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    if (ticks[i].first > ticks[i].last) throw InvariantViolation("interval has first > last", indexed(where, i));
    if (ticks[i].last > horizon) {
      throw InvariantViolation("interval ends after horizon " + std::to_string(horizon), indexed(where, i));
    }
  }
}

}  // namespace

std::string_view to_string(ComponentKind kind) noexcept {
  return kind == ComponentKind::Physical ? "physical" : "virtual";
}

std::string_view check_name(const CheckSpec& check) noexcept {
  switch (check.index()) {
    case 0: return "collision";
    case 1: return "sensor_coverage";
    case 2: return "tool_workpiece";
    default: return "replacement";
  }
}

Trace play_script(const Script& script, const std::string& component, Tick horizon, const Vec3& placement) {
  Trace trace{component, {}};
  trace.records.reserve(static_cast<std::size_t>(horizon) + 1);
  for (Tick t = 0;; ++t) {
    std::vector<Region> occupied;
    std::vector<Region> sensed;
    TraceRecord r{t, {}, {}, {}};
    for (const ScriptSegment& s : script.segments) {
      if (!s.ticks.contains(t)) continue;
      occupied.push_back(s.occupied.translated(placement));
      sensed.push_back(s.sensed.translated(placement));
      r.events.insert(s.events.begin(), s.events.end());
    }
    r.occupied = region_union(occupied);
    r.sensed = region_union(sensed);
    trace.records.push_back(std::move(r));
    if (t == horizon) break;
  }
  return trace;
}

const BehaviorType* Scenario::find_behavior(std::string_view id) const noexcept {
  return find_by(behaviors, id, [](const BehaviorType& b) -> const std::string& { return b.id; });
}

const Script* Scenario::find_script(std::string_view id) const noexcept {
  return find_by(scripts, id, [](const Script& s) -> const std::string& { return s.id; });
}

const Component* Scenario::find_component(std::string_view id) const noexcept {
  return find_by(components, id, [](const Component& c) -> const std::string& { return c.id; });
}

const Link* Scenario::find_link(std::string_view from, std::string_view to) const noexcept {
  auto it = std::find_if(links.begin(), links.end(), [&](const Link& l) { return l.from == from && l.to == to; });
  return it == links.end() ? nullptr : &*it;
}

void Scenario::validate() const {
  if (tick_ms == 0) throw InvariantViolation("tick length must be positive", "tick_ms");
  if (cell_size <= 0) throw InvariantViolation("cell size must be positive", "cell_size");

  std::set<std::string> site_names;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    check_identifier(sites[i], indexed("sites", i));
    if (!site_names.insert(sites[i]).second) {
      throw InvariantViolation("duplicate site '" + sites[i] + "'", indexed("sites", i));
    }
  }
  auto require_site = [&](const std::string& site, const std::string& where) {
    if (!site_names.contains(site)) throw UnresolvedReference("unknown site '" + site + "'", where);
  };

  std::set<std::string> ids;
  for (std::size_t i = 0; i < behaviors.size(); ++i) {
    const std::string where = indexed("behaviors", i);
    check_identifier(behaviors[i].id, where + ".id");
    if (!ids.insert(behaviors[i].id).second) {
      throw InvariantViolation("duplicate behavior '" + behaviors[i].id + "'", where + ".id");
    }
    if (behaviors[i].horizon < horizon) {
      throw InvariantViolation("behavior horizon is shorter than the scenario horizon", where);
    }
    try {
      behaviors[i].validate();
    } catch (const InvariantViolation& e) {
      throw InvariantViolation(e.what(), where);
    }
  }

  ids.clear();
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    const std::string where = indexed("scripts", i);
    check_identifier(scripts[i].id, where + ".id");
    if (!ids.insert(scripts[i].id).second) {
      throw InvariantViolation("duplicate script '" + scripts[i].id + "'", where + ".id");
    }
    for (std::size_t k = 0; k < scripts[i].segments.size(); ++k) {
      const TickInterval& ticks = scripts[i].segments[k].ticks;
      if (ticks.first > ticks.last) {
        throw InvariantViolation("interval has first > last", where + "." + indexed("segments", k) + ".ticks");
      }
    }
  }

  // Declared components, then replicas: every id an operation may reference.
  std::map<std::string, std::size_t> component_index;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const Component& c = components[i];
    const std::string where = indexed("components", i);
    check_identifier(c.id, where + ".id");
    if (!component_index.emplace(c.id, i).second) {
      throw InvariantViolation("duplicate component '" + c.id + "'", where + ".id");
    }
    require_site(c.site, where + ".site");
    if (!c.behavior.empty() && find_behavior(c.behavior) == nullptr) {
      throw UnresolvedReference("unknown behavior '" + c.behavior + "'", where + ".behavior");
    }
    if (c.kind == ComponentKind::Virtual) {
      if (c.behavior.empty()) throw InvariantViolation("virtual component needs a behavior", where + ".behavior");
      if (!c.script.empty()) throw InvariantViolation("virtual component cannot replay a script", where + ".script");
    } else {
      if (c.script.empty()) throw InvariantViolation("physical component needs a script", where + ".script");
      if (find_script(c.script) == nullptr) {
        throw UnresolvedReference("unknown script '" + c.script + "'", where + ".script");
      }
    }
  }

  std::set<std::string> all_ids;
  for (const auto& [id, _] : component_index) all_ids.insert(id);
  std::set<std::string> replicated;
  for (std::size_t i = 0; i < replications.size(); ++i) {
    const ReplicationDirective& d = replications[i];
    const std::string where = indexed("replications", i);
    if (!component_index.contains(d.source)) {
      throw UnresolvedReference("unknown component '" + d.source + "'", where + ".source");
    }
    if (!replicated.insert(d.source).second) {
      throw InvariantViolation("component '" + d.source + "' is replicated twice", where + ".source");
    }
    require_site(d.site, where + ".site");
    if (d.count == 0) throw InvariantViolation("replica count must be positive", where + ".count");
    if (d.count != d.placements.size()) {
      throw InvariantViolation("count " + std::to_string(d.count) + " does not match " +
                                   std::to_string(d.placements.size()) + " placements",
                               where + ".count");
    }
    std::set<Vec3> seen;
    for (std::size_t k = 0; k < d.placements.size(); ++k) {
      if (!seen.insert(d.placements[k]).second) {
        throw InvariantViolation("duplicate placement", where + "." + indexed("placements", k));
      }
    }
    for (std::size_t k = 1; k <= d.count; ++k) all_ids.insert(d.source + "#" + std::to_string(k));
  }

  std::set<std::pair<std::string, std::string>> routes;
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    const std::string where = indexed("links", i);
    require_site(l.from, where + ".from");
    require_site(l.to, where + ".to");
    if (l.from == l.to) throw InvariantViolation("link must connect two different sites", where);
    if (!(l.drop >= 0.0 && l.drop <= 1.0)) throw InvariantViolation("drop probability must lie in [0, 1]", where + ".drop");
    if (!routes.emplace(l.from, l.to).second) throw InvariantViolation("duplicate link " + l.id(), where);
  }

  auto require_component = [&](const std::string& id, const std::string& where) {
    if (!all_ids.contains(id)) throw UnresolvedReference("unknown component '" + id + "'", where);
  };
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const std::string where = indexed("checks", i);
    std::visit(
        [&](const auto& check) {
          using T = std::decay_t<decltype(check)>;
          if constexpr (std::is_same_v<T, SensorCoverageCheck>) {
            check_intervals(check.ticks, horizon, where + ".ticks");
          } else if constexpr (std::is_same_v<T, ToolWorkpieceCheck>) {
            require_component(check.tool, where + ".tool");
            require_component(check.workpiece, where + ".workpiece");
            if (check.tool == check.workpiece) throw InvariantViolation("tool and workpiece are the same component", where);
            check_intervals(check.schedule, horizon, where + ".schedule");
          } else if constexpr (std::is_same_v<T, ReplacementCheck>) {
            if (!component_index.contains(check.old_component)) {
              throw UnresolvedReference("unknown component '" + check.old_component + "'", where + ".old");
            }
            if (find_behavior(check.new_behavior) == nullptr) {
              throw UnresolvedReference("unknown behavior '" + check.new_behavior + "'", where + ".new");
            }
          }
        },
        checks[i]);
  }
}

ResolvedComponent resolve_component(const Scenario& scenario, const Component& c) {
  ResolvedComponent out;
  out.id = c.id;
  out.site = c.site;
  out.type_name = c.type_name;
  out.kind = c.kind;
  if (const BehaviorType* bt = scenario.find_behavior(c.behavior)) out.declared = translate_bt(*bt, c.placement);

  if (c.kind == ComponentKind::Physical) {
    const Script* script = scenario.find_script(c.script);
    if (script == nullptr) throw UnresolvedReference("unknown script '" + c.script + "'", "component '" + c.id + "'");
    out.script = play_script(*script, c.id, scenario.horizon, c.placement);
    out.behavior = bt_from_trace(*out.script, scenario.horizon);
  } else {
    if (!out.declared) throw UnresolvedReference("unknown behavior '" + c.behavior + "'", "component '" + c.id + "'");
    out.behavior = *out.declared;
  }
  out.behavior.id = c.id;
  return out;
}

std::vector<ResolvedComponent> resolve_components(const Scenario& scenario) {
  scenario.validate();
  std::vector<ResolvedComponent> out;
  for (const Component& c : scenario.components) out.push_back(resolve_component(scenario, c));
  for (const ReplicationDirective& d : scenario.replications) {
    auto source = std::find_if(out.begin(), out.end(), [&](const ResolvedComponent& r) { return r.id == d.source; });
    auto replicas = replicate(*source, d);
    out.insert(out.end(), std::make_move_iterator(replicas.begin()), std::make_move_iterator(replicas.end()));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

}  // namespace cvlab
