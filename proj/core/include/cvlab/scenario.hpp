#pragma once

// Scenario data model: sites, components, replication directives, network
// links and the checks to run. Plain values; validate() enforces the
// cross-reference and shape invariants.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cvlab/btmodel.hpp"
#include "cvlab/geometry.hpp"

namespace cvlab {

enum class ComponentKind { Physical, Virtual };

std::string_view to_string(ComponentKind kind) noexcept;

/// A hand-written or recorded actuator stream: what a scripted (physical)
/// component does over a tick interval.
struct ScriptSegment {
  TickInterval ticks;
  Region occupied;
  Region sensed;
  std::set<EventId> events;

  friend bool operator==(const ScriptSegment&, const ScriptSegment&) = default;
};

struct Script {
  std::string id;
  std::vector<ScriptSegment> segments;

  friend bool operator==(const Script&, const Script&) = default;
};

/// Plays a script back as a trace with one record per tick in [0, horizon],
/// translated by `placement`. Overlapping segments are unioned.
Trace play_script(const Script& script, const std::string& component, Tick horizon, const Vec3& placement);

/// A component of the installation. Physical components replay `script`;
/// virtual ones execute `behavior`. A physical component may also declare a
/// `behavior` as its type, against which its script is expected to conform.
struct Component {
  std::string id;
  std::string site;
  std::string type_name;
  ComponentKind kind = ComponentKind::Virtual;
  std::string behavior;  // id of a BehaviorType; required for virtual components
  std::string script;    // id of a Script; required for physical components
  Vec3 placement{};

  friend bool operator==(const Component&, const Component&) = default;
};

/// Derives `placements.size()` virtual replicas of `source` at `site`.
struct ReplicationDirective {
  std::string source;
  std::size_t count = 0;
  std::vector<Vec3> placements;
  std::string site;

  friend bool operator==(const ReplicationDirective&, const ReplicationDirective&) = default;
};

/// Simulated network medium between two sites.
struct Link {
  std::string from;
  std::string to;
  Tick latency = 0;
  Tick jitter = 0;
  double drop = 0.0;

  /// Stable identity used to derive the link's random stream.
  std::string id() const { return from + "->" + to; }

  friend bool operator==(const Link&, const Link&) = default;
};

struct CollisionCheck {
  friend bool operator==(const CollisionCheck&, const CollisionCheck&) = default;
};

struct SensorCoverageCheck {
  Region target;
  std::vector<TickInterval> ticks;

  friend bool operator==(const SensorCoverageCheck&, const SensorCoverageCheck&) = default;
};

struct ToolWorkpieceCheck {
  std::string tool;
  std::string workpiece;
  std::vector<TickInterval> schedule;

  friend bool operator==(const ToolWorkpieceCheck&, const ToolWorkpieceCheck&) = default;
};

struct ReplacementCheck {
  std::string old_component;
  std::string new_behavior;  // id of a BehaviorType in the scenario

  friend bool operator==(const ReplacementCheck&, const ReplacementCheck&) = default;
};

using CheckSpec = std::variant<CollisionCheck, SensorCoverageCheck, ToolWorkpieceCheck, ReplacementCheck>;

std::string_view check_name(const CheckSpec& check) noexcept;

struct Scenario {
  std::string name;
  Tick horizon = 0;
  std::uint32_t tick_ms = 100;
  std::uint64_t seed = 0;
  Coord cell_size = 1;
  std::vector<std::string> sites;
  std::vector<BehaviorType> behaviors;
  std::vector<Script> scripts;
  std::vector<Component> components;
  std::vector<ReplicationDirective> replications;
  std::vector<Link> links;
  std::vector<CheckSpec> checks;

  const BehaviorType* find_behavior(std::string_view id) const noexcept;
  const Script* find_script(std::string_view id) const noexcept;
  const Component* find_component(std::string_view id) const noexcept;
  const Link* find_link(std::string_view from, std::string_view to) const noexcept;

  /// Throws UnresolvedReference or InvariantViolation; the location names the
  /// offending entry (e.g. "components[2].site").
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// A component with its behavior resolved into world coordinates.
struct ResolvedComponent {
  std::string id;
  std::string site;
  std::string type_name;
  ComponentKind kind = ComponentKind::Virtual;
  /// What the component actually does: the placed behavior for virtual
  /// components, the type inferred from the played script for physical ones.
  BehaviorType behavior;
  /// The declared type, placed; absent for physical components without one.
  std::optional<BehaviorType> declared;
  /// Played script, placed; present for physical components and their replicas.
  std::optional<Trace> script;
  std::optional<std::string> replica_of;
};

/// Resolves declared components and expands replication directives. The
/// result is sorted by component id. Throws like Scenario::validate().
std::vector<ResolvedComponent> resolve_components(const Scenario& scenario);

/// Resolves one declared component without expanding replicas.
ResolvedComponent resolve_component(const Scenario& scenario, const Component& component);

}  // namespace cvlab
