#include "cvlab/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "cvlab/error.hpp"
#include "cvlab/simulate.hpp"

namespace cvlab {

namespace {

const ResolvedComponent& find_resolved(std::span<const ResolvedComponent> components, const std::string& id) {
  auto it = std::find_if(components.begin(), components.end(), [&](const auto& c) { return c.id == id; });
  if (it == components.end()) throw MissingComponent("unknown component '" + id + "'");
  return *it;
}

bool is_contact(RccRelation r) { return r == RccRelation::BoundaryContact || r == RccRelation::Overlapping; }

Coord floor_to(Coord v, Coord cell) {
  Coord q = v / cell;
  if (v % cell != 0 && v < 0) --q;
  return q * cell;
}

Coord ceil_to(Coord v, Coord cell) {
  Coord q = v / cell;
  if (v % cell != 0 && v > 0) ++q;
  return q * cell;
}

Box snap(const Box& b, Coord cell) {
  Vec3 lo{};
  Vec3 hi{};
  for (std::size_t a = 0; a < 3; ++a) {
    lo[a] = floor_to(b.min()[a], cell);
    hi[a] = ceil_to(b.max()[a], cell);
  }
  return Box(lo, hi);
}

std::string join_verdicts(const std::vector<std::pair<std::string, Verdict>>& parts) {
  std::string out;
  for (const auto& [name, v] : parts) {
    if (!out.empty()) out += "; ";
    out += name + ": " + std::string(to_string(v.status));
    if (!v.passed()) out += " (" + v.explanation + ")";
  }
  return out;
}

}  // namespace

Verdict check_collision(std::span<const ResolvedComponent> components, Tick horizon) {
  std::optional<Verdict> earliest;
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (std::size_t j = i + 1; j < components.size(); ++j) {
      const auto& [a, b] = components[i].id < components[j].id ? std::tie(components[i], components[j])
                                                               : std::tie(components[j], components[i]);
      Verdict v = compatible(a.behavior, b.behavior, horizon);
      if (v.passed()) continue;
      const bool better = !earliest || v.witness->tick < earliest->witness->tick ||
                          (v.witness->tick == earliest->witness->tick &&
                           v.witness->components < earliest->witness->components);
      if (better) earliest = std::move(v);
    }
  }
  if (earliest) return *earliest;
  return Verdict::pass("no collision among " + std::to_string(components.size()) + " components over [0, " +
                       std::to_string(horizon) + "]");
}

Verdict check_collision(const Scenario& scenario, Tick horizon) {
  const auto components = resolve_components(scenario);
  return check_collision(components, horizon);
}

Verdict check_sensor_coverage(const Scenario& scenario, const Region& target,
                              std::span<const TickInterval> required_ticks) {
  std::set<Tick> ticks;
  for (const TickInterval& iv : required_ticks) {
    if (iv.first > iv.last || iv.last > scenario.horizon) {
      throw InvariantViolation("required ticks must lie within [0, " + std::to_string(scenario.horizon) + "]");
    }
    for (Tick t = iv.first;; ++t) {
      ticks.insert(t);
      if (t == iv.last) break;
    }
  }
  if (ticks.empty() || target.empty()) return Verdict::pass("nothing to cover");

  const auto components = resolve_components(scenario);
  for (Tick t : ticks) {
    const Region coverage = composed_sensor_stream(components, t);
    const auto gaps = uncovered_boxes(target, coverage);
    if (!gaps.empty()) {
      Witness w;
      w.tick = t;
      w.kind = WitnessKind::Sensor;
      w.region = Region(gaps.front());
      return Verdict::fail(std::move(w), "target not covered by sensors at tick " + std::to_string(t));
    }
  }
  return Verdict::pass("target covered at all " + std::to_string(ticks.size()) + " required ticks");
}

Verdict check_tool_workpiece(const Scenario& scenario, const std::string& tool, const std::string& workpiece,
                             std::span<const TickInterval> schedule) {
  const auto components = resolve_components(scenario);
  const ResolvedComponent& t_comp = find_resolved(components, tool);
  const ResolvedComponent& w_comp = find_resolved(components, workpiece);

  for (Tick t = 0;; ++t) {
    const Region a = occupancy_at(t_comp.behavior, t);
    const Region b = occupancy_at(w_comp.behavior, t);
    const RccRelation rel = (a.empty() || b.empty()) ? RccRelation::Disconnected : rcc_relate(a, b);
    const bool scheduled =
        std::any_of(schedule.begin(), schedule.end(), [&](const TickInterval& iv) { return iv.contains(t); });
    const bool ok = scheduled ? is_contact(rel) : rel == RccRelation::Disconnected;
    if (!ok) {
      Witness w;
      w.tick = t;
      w.kind = WitnessKind::Occupancy;
      w.region = region_intersection(a, b);
      w.components = {tool, workpiece};
      w.relation = rel;
      return Verdict::fail(std::move(w), "'" + tool + "' and '" + workpiece + "' are " +
                                             std::string(to_string(rel)) + " at tick " + std::to_string(t) +
                                             (scheduled ? " during scheduled contact" : " outside scheduled contact"));
    }
    if (t == scenario.horizon) break;
  }
  return Verdict::pass("'" + tool + "' meets '" + workpiece + "' exactly as scheduled");
}

Scenario substitute(const Scenario& scenario, const std::string& old_component, const BehaviorType& replacement) {
  Scenario out = scenario;
  auto comp = std::find_if(out.components.begin(), out.components.end(),
                           [&](const Component& c) { return c.id == old_component; });
  if (comp == out.components.end()) throw MissingComponent("unknown component '" + old_component + "'");

  auto existing = std::find_if(out.behaviors.begin(), out.behaviors.end(),
                               [&](const BehaviorType& b) { return b.id == replacement.id; });
  if (existing == out.behaviors.end()) {
    out.behaviors.push_back(replacement);
  } else {
    *existing = replacement;
  }
  comp->kind = ComponentKind::Virtual;
  comp->behavior = replacement.id;
  comp->script.clear();
  return out;
}

Verdict check_replacement(const Scenario& scenario, const std::string& old_component,
                          const BehaviorType& replacement) {
  const Component* old = scenario.find_component(old_component);
  if (old == nullptr) throw MissingComponent("unknown component '" + old_component + "'");
  if (replacement.horizon < scenario.horizon) {
    throw HorizonError("replacement '" + replacement.id + "' does not cover the scenario horizon");
  }

  const ResolvedComponent resolved = resolve_component(scenario, *old);
  const BehaviorType& old_type = resolved.declared ? *resolved.declared : resolved.behavior;
  const BehaviorType placed = translate_bt(replacement, old->placement);

  std::vector<std::pair<std::string, Verdict>> parts;
  parts.emplace_back("refinement", refines(placed, old_type, scenario.horizon));

  const Scenario swapped = substitute(scenario, old_component, replacement);
  for (const CheckSpec& check : swapped.checks) {
    if (std::holds_alternative<ReplacementCheck>(check)) continue;
    parts.emplace_back(std::string(check_name(check)), run_check(swapped, check));
  }

  const std::string summary = join_verdicts(parts);
  for (auto& [name, v] : parts) {
    if (!v.passed()) {
      return Verdict::fail(*v.witness, "replacing '" + old_component + "' by '" + replacement.id + "' fails " + name +
                                           ": " + summary);
    }
  }
  return Verdict::pass("'" + replacement.id + "' can replace '" + old_component + "': " + summary);
}

Box GridEncoding::cell_box(std::size_t cell) const {
  if (!space) throw std::out_of_range("empty grid has no cells");
  const std::size_t z = cell % dims[2];
  const std::size_t y = (cell / dims[2]) % dims[1];
  const std::size_t x = cell / (dims[2] * dims[1]);
  const std::array<std::size_t, 3> xyz{x, y, z};
  Vec3 lo{};
  Vec3 hi{};
  for (std::size_t a = 0; a < 3; ++a) {
    lo[a] = space->min()[a] + static_cast<Coord>(xyz[a]) * cell_size;
    hi[a] = lo[a] + cell_size;
  }
  return Box(lo, hi);
}

GridEncoding encode_grid(std::span<const ResolvedComponent> components, Tick horizon, const GridOptions& options) {
  if (options.cell_size <= 0) throw InvariantViolation("cell size must be positive");
  const Coord c = options.cell_size;

  GridEncoding enc;
  enc.cell_size = c;
  enc.horizon = horizon;
  for (const ResolvedComponent& comp : components) enc.components.push_back(comp.id);

  // occupancy[t][k]
  std::vector<std::vector<Region>> occupancy(static_cast<std::size_t>(horizon) + 1);
  std::vector<Region> all;
  for (Tick t = 0;; ++t) {
    for (const ResolvedComponent& comp : components) {
      occupancy[t].push_back(occupancy_at(comp.behavior, t));
      all.push_back(occupancy[t].back());
    }
    if (t == horizon) break;
  }

  const std::optional<Box> extent = options.space ? options.space : region_union(all).bounds();
  if (!extent || components.empty()) return enc;
  enc.space = snap(*extent, c);
  for (std::size_t a = 0; a < 3; ++a) enc.dims[a] = static_cast<std::size_t>(enc.space->extent(a) / c);

  const std::uint64_t cells = enc.cell_count();
  if (cells == 0) return enc;
  const std::uint64_t ticks = static_cast<std::uint64_t>(horizon) + 1;
  if (cells > options.cell_budget / ticks) {
    throw BudgetExceeded(std::to_string(cells) + " cells x " + std::to_string(ticks) + " ticks exceeds budget " +
                         std::to_string(options.cell_budget));
  }
  if (enc.variable_count() >= static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw BudgetExceeded("too many grid variables");
  }

  std::vector<std::uint8_t> truth(enc.variable_count(), 0);
  const Box& space = *enc.space;
  for (Tick t = 0;; ++t) {
    for (std::size_t k = 0; k < components.size(); ++k) {
      for (const Box& raw : occupancy[t][k].boxes()) {
        const Box b = snap(raw, c);
        std::array<std::size_t, 3> from{};
        std::array<std::size_t, 3> to{};
        bool empty = false;
        for (std::size_t a = 0; a < 3; ++a) {
          const Coord lo = std::max(b.min()[a], space.min()[a]);
          const Coord hi = std::min(b.max()[a], space.max()[a]);
          if (lo >= hi) {
            empty = true;
            break;
          }
          from[a] = static_cast<std::size_t>((lo - space.min()[a]) / c);
          to[a] = static_cast<std::size_t>((hi - space.min()[a]) / c);
        }
        if (empty) continue;
        for (std::size_t x = from[0]; x < to[0]; ++x) {
          for (std::size_t y = from[1]; y < to[1]; ++y) {
            for (std::size_t z = from[2]; z < to[2]; ++z) truth[enc.variable(t, enc.cell_index({x, y, z}), k)] = 1;
          }
        }
      }
    }
    if (t == horizon) break;
  }

  enc.units.reserve(truth.size());
  for (std::size_t v = 0; v < truth.size(); ++v) {
    const auto lit = static_cast<std::int32_t>(v + 1);
    enc.units.push_back(truth[v] ? lit : -lit);
  }

  const std::size_t n = components.size();
  enc.clauses_per_group = n * (n - 1) / 2;
  enc.clauses.reserve(static_cast<std::size_t>(ticks) * cells * enc.clauses_per_group * 3);
  for (Tick t = 0;; ++t) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          enc.clauses.push_back(-static_cast<std::int32_t>(enc.variable(t, cell, i) + 1));
          enc.clauses.push_back(-static_cast<std::int32_t>(enc.variable(t, cell, j) + 1));
          enc.clauses.push_back(0);
        }
      }
    }
    if (t == horizon) break;
  }
  return enc;
}

GridEncoding encode_grid(const Scenario& scenario, Coord cell_size, Tick horizon) {
  const auto components = resolve_components(scenario);
  GridOptions options;
  options.cell_size = cell_size;
  return encode_grid(components, horizon, options);
}

GridResult solve_grid(const GridEncoding& enc) {
  const std::size_t n = enc.variable_count();
  std::vector<std::int8_t> value(n, -1);
  auto lit_value = [&](std::int32_t lit) -> int {
    const std::int8_t v = value[static_cast<std::size_t>(std::abs(lit)) - 1];
    if (v < 0) return -1;
    return (lit > 0) == (v == 1) ? 1 : 0;
  };
  auto conflict_at = [&](Tick t, std::size_t cell) {
    GridConflict c;
    c.tick = t;
    c.cell = cell;
    c.cell_box = enc.cell_box(cell);
    for (std::size_t k = 0; k < enc.components.size(); ++k) {
      if (value[enc.variable(t, cell, k)] == 1) c.components.push_back(enc.components[k]);
    }
    return GridResult{false, std::move(c)};
  };
  auto group_of_variable = [&](std::size_t v) {
    const std::size_t group = v / std::max<std::size_t>(enc.components.size(), 1);
    return std::pair<Tick, std::size_t>(static_cast<Tick>(group / enc.cell_count()), group % enc.cell_count());
  };

  for (std::int32_t lit : enc.units) {
    const std::size_t v = static_cast<std::size_t>(std::abs(lit)) - 1;
    const std::int8_t want = lit > 0 ? 1 : 0;
    if (value[v] >= 0 && value[v] != want) {
      auto [t, cell] = group_of_variable(v);
      return conflict_at(t, cell);
    }
    value[v] = want;
  }

  // Propagate to a fixpoint; the first falsified clause in encoding order is
  // the lexicographically smallest conflicting (tick, cell).
  for (bool changed = true; changed;) {
    changed = false;
    std::size_t clause = 0;
    for (std::size_t i = 0; i < enc.clauses.size(); ++clause) {
      std::size_t unassigned = 0;
      std::int32_t last_free = 0;
      bool satisfied = false;
      for (; enc.clauses[i] != 0; ++i) {
        const int v = lit_value(enc.clauses[i]);
        if (v == 1) satisfied = true;
        if (v < 0) {
          ++unassigned;
          last_free = enc.clauses[i];
        }
      }
      ++i;  // skip terminator
      if (satisfied) continue;
      if (unassigned == 0) {
        const std::size_t group = clause / enc.clauses_per_group;
        return conflict_at(static_cast<Tick>(group / enc.cell_count()), group % enc.cell_count());
      }
      if (unassigned == 1) {
        value[static_cast<std::size_t>(std::abs(last_free)) - 1] = last_free > 0 ? 1 : 0;
        changed = true;
      }
    }
  }

  // Whatever is still free occurs with one polarity only in this encoding.
  std::vector<std::uint8_t> polarity(n, 0);  // bit 0: positive, bit 1: negative
  for (std::int32_t lit : enc.clauses) {
    if (lit != 0) polarity[static_cast<std::size_t>(std::abs(lit)) - 1] |= lit > 0 ? 1 : 2;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (value[v] >= 0) continue;
    if (polarity[v] == 3) throw std::logic_error("grid encoding needs search; propagation alone is incomplete");
    value[v] = polarity[v] == 1 ? 1 : 0;
  }
  return GridResult{true, std::nullopt};
}

Verdict check_collision_grid(std::span<const ResolvedComponent> components, Tick horizon, const GridOptions& options) {
  const GridEncoding enc = encode_grid(components, horizon, options);
  const GridResult result = solve_grid(enc);
  if (result.satisfiable) {
    return Verdict::pass("grid satisfiable: " + std::to_string(enc.variable_count()) + " variables, no cell shared");
  }
  const GridConflict& c = *result.conflict;
  Witness w;
  w.tick = c.tick;
  w.kind = WitnessKind::Occupancy;
  w.region = Region(c.cell_box);
  w.cell = c.cell_box;
  w.components = c.components;
  std::string names;
  for (const auto& id : c.components) names += (names.empty() ? "'" : ", '") + id + "'";
  return Verdict::fail(std::move(w), "grid unsatisfiable: " + names + " share cell " + std::to_string(c.cell) +
                                         " at tick " + std::to_string(c.tick));
}

Verdict run_check(const Scenario& scenario, const CheckSpec& check) {
  return std::visit(
      [&](const auto& spec) -> Verdict {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, CollisionCheck>) {
          return check_collision(scenario, scenario.horizon);
        } else if constexpr (std::is_same_v<T, SensorCoverageCheck>) {
          return check_sensor_coverage(scenario, spec.target, spec.ticks);
        } else if constexpr (std::is_same_v<T, ToolWorkpieceCheck>) {
          return check_tool_workpiece(scenario, spec.tool, spec.workpiece, spec.schedule);
        } else {
          const BehaviorType* bt = scenario.find_behavior(spec.new_behavior);
          if (bt == nullptr) throw UnresolvedReference("unknown behavior '" + spec.new_behavior + "'");
          return check_replacement(scenario, spec.old_component, *bt);
        }
      },
      check);
}

std::vector<CheckOutcome> run_checks(const Scenario& scenario, const CheckOptions& options) {
  std::vector<CheckOutcome> out;
  for (const CheckSpec& check : scenario.checks) {
    CheckOutcome o{std::string(check_name(check)), "sweep", run_check(scenario, check), std::nullopt};
    if (options.cross_check && std::holds_alternative<CollisionCheck>(check)) {
      const auto components = resolve_components(scenario);
      o.grid = check_collision_grid(components, scenario.horizon, options.grid);
      o.engine = "both";
      const bool agree = o.verdict.status == o.grid->status &&
                         (o.verdict.passed() || o.verdict.witness->tick == o.grid->witness->tick);
      if (!agree) {
        const Verdict& failing = o.verdict.passed() ? *o.grid : o.verdict;
        o.verdict = Verdict::fail(*failing.witness, "engines disagree: sweep " +
                                                        std::string(to_string(o.verdict.status)) + ", grid " +
                                                        std::string(to_string(o.grid->status)));
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace cvlab
