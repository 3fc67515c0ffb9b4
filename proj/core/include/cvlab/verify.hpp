#pragma once

// Scenario-level spatio-temporal checks. Collision freedom has two
// independent engines: a per-tick sweep over component pairs, and a boolean
// occupancy grid over (tick, cell, component) solved by propagation.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvlab/scenario.hpp"
#include "cvlab/typecheck.hpp"

namespace cvlab {

// --- sweep engine and scenario checks -------------------------------------

/// Pass iff every unordered pair of components is compatible. A failure
/// reports the earliest tick, then the lexicographically smallest pair.
Verdict check_collision(std::span<const ResolvedComponent> components, Tick horizon);
Verdict check_collision(const Scenario& scenario, Tick horizon);

/// Pass iff at every required tick `target` lies inside the union of all
/// components' sensor coverage. A failure carries the first uncovered tick and
/// one uncovered sub-box.
Verdict check_sensor_coverage(const Scenario& scenario, const Region& target,
                              std::span<const TickInterval> required_ticks);

/// Pass iff tool and workpiece are in contact (boundary contact or overlap)
/// exactly during the scheduled intervals and disconnected at every other
/// tick. An empty occupancy counts as disconnected.
Verdict check_tool_workpiece(const Scenario& scenario, const std::string& tool, const std::string& workpiece,
                             std::span<const TickInterval> schedule);

/// The scenario with `old_component` turned into a virtual component executing
/// `replacement` (given in the component's local frame, like its type).
Scenario substitute(const Scenario& scenario, const std::string& old_component, const BehaviorType& replacement);

/// Pass iff `replacement` refines the old component's type and every other
/// check of the scenario still passes after substitution.
Verdict check_replacement(const Scenario& scenario, const std::string& old_component,
                          const BehaviorType& replacement);

// --- grid engine ----------------------------------------------------------

struct GridOptions {
  Coord cell_size = 1;
  /// Grid extent; defaults to the bounding box of all occupancy. Snapped
  /// outward to cell boundaries either way.
  std::optional<Box> space;
  /// Upper bound on cells × ticks.
  std::uint64_t cell_budget = 1'000'000;
};

/// CNF over occupancy variables. Variable ids are dense:
/// id(t, cell, k) = (t * cells + cell) * components + k. Literals are
/// DIMACS-style: +(id + 1) or -(id + 1).
struct GridEncoding {
  Coord cell_size = 1;
  std::optional<Box> space;
  std::array<std::size_t, 3> dims{};
  Tick horizon = 0;
  std::vector<std::string> components;

  /// One unit clause per variable fixing its value from the scenario.
  std::vector<std::int32_t> units;
  /// Pairwise at-most-one clauses, 0-terminated, grouped by (tick, cell) in
  /// lexicographic order with `clauses_per_group` clauses per group.
  std::vector<std::int32_t> clauses;
  std::size_t clauses_per_group = 0;

  std::size_t cell_count() const noexcept { return dims[0] * dims[1] * dims[2]; }
  std::size_t tick_count() const noexcept { return cell_count() == 0 ? 0 : static_cast<std::size_t>(horizon) + 1; }
  std::size_t variable_count() const noexcept { return tick_count() * cell_count() * components.size(); }
  std::size_t variable(Tick t, std::size_t cell, std::size_t component) const noexcept {
    return (static_cast<std::size_t>(t) * cell_count() + cell) * components.size() + component;
  }
  /// Cells are numbered lexicographically by (x, y, z) index.
  std::size_t cell_index(const std::array<std::size_t, 3>& xyz) const noexcept {
    return (xyz[0] * dims[1] + xyz[1]) * dims[2] + xyz[2];
  }
  Box cell_box(std::size_t cell) const;
};

/// Encodes occupancy of the components over [0, horizon]. Box coordinates are
/// snapped outward to multiples of the cell size, so the encoding
/// over-approximates when they are not aligned. Throws BudgetExceeded.
GridEncoding encode_grid(std::span<const ResolvedComponent> components, Tick horizon, const GridOptions& options);
GridEncoding encode_grid(const Scenario& scenario, Coord cell_size, Tick horizon);

struct GridConflict {
  Tick tick = 0;
  std::size_t cell = 0;
  Box cell_box;
  std::vector<std::string> components;
};

struct GridResult {
  bool satisfiable = true;
  std::optional<GridConflict> conflict;  // present iff unsatisfiable
};

/// Unit propagation plus pure-literal assignment. The conflict reported is the
/// lexicographically smallest (tick, cell) whose at-most-one clause fails.
GridResult solve_grid(const GridEncoding& encoding);

/// Collision check through the grid engine.
Verdict check_collision_grid(std::span<const ResolvedComponent> components, Tick horizon, const GridOptions& options);

// --- whole-scenario runs ----------------------------------------------------

struct CheckOptions {
  bool cross_check = false;
  GridOptions grid;
};

struct CheckOutcome {
  std::string name;
  std::string engine;  // "sweep", "grid" or "both"
  Verdict verdict;
  std::optional<Verdict> grid;  // grid-engine verdict when cross-checked
};

Verdict run_check(const Scenario& scenario, const CheckSpec& check);

/// Runs every check of the scenario over its horizon. With cross_check,
/// collision checks also run the grid engine and fail if the engines disagree
/// on status or witness tick.
std::vector<CheckOutcome> run_checks(const Scenario& scenario, const CheckOptions& options);

}  // namespace cvlab
