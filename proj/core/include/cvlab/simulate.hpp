#pragma once

// Deterministic cyber-virtual co-simulation. Physical components replay
// scripted actuator streams, virtual components execute behavioral types,
// and replicas mirror a source component at other placements. Sites exchange
// actuator events and composed sensor samples over simulated links.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvlab/btmodel.hpp"
#include "cvlab/scenario.hpp"

namespace cvlab {

/// Source of a component's per-tick actuator record. Scripted playback and
/// type execution both implement it; a live hardware feed would too.
class ActuatorFeed {
 public:
  virtual ~ActuatorFeed() = default;
  virtual TraceRecord sample(Tick t) const = 0;
};

class ScriptedFeed final : public ActuatorFeed {
 public:
  explicit ScriptedFeed(Trace trace) : trace_(std::move(trace)) {}
  TraceRecord sample(Tick t) const override;

 private:
  Trace trace_;
};

class BehaviorFeed final : public ActuatorFeed {
 public:
  explicit BehaviorFeed(BehaviorType bt) : bt_(std::move(bt)) {}
  TraceRecord sample(Tick t) const override;

 private:
  BehaviorType bt_;
};

std::unique_ptr<ActuatorFeed> make_feed(const ResolvedComponent& component);

/// Expands a directive into virtual replicas "<source>#1".."<source>#n", each
/// behaving like `source` translated by its placement. Throws
/// InvariantViolation for malformed directives and OverflowError when a
/// placement leaves the coordinate range.
std::vector<ResolvedComponent> replicate(const ResolvedComponent& source, const ReplicationDirective& directive);

/// Union of the components' sensed regions at t; what a physical counterpart
/// receives as virtual sensor input.
Region composed_sensor_stream(std::span<const ResolvedComponent> components, Tick t);

enum class MessageKind { ActuatorEvent, SensorSample };
enum class DeliveryStatus { Delivered, Dropped, InFlight };

std::string_view to_string(MessageKind kind) noexcept;
std::string_view to_string(DeliveryStatus status) noexcept;

struct Message {
  MessageKind kind = MessageKind::ActuatorEvent;
  std::string link;
  std::string sender;
  std::string receiver;
  Tick sent = 0;
  /// Scheduled delivery tick; absent when dropped.
  std::optional<Tick> delivery;
  DeliveryStatus status = DeliveryStatus::InFlight;
  EventId event;  // ActuatorEvent payload
  Region region;  // SensorSample payload, sampled at `sent`

  friend bool operator==(const Message&, const Message&) = default;
};

/// What arrived at a component over the network at one tick.
struct InboundRecord {
  Tick tick = 0;
  std::vector<std::pair<std::string, EventId>> events;  // (sender, event), sorted
  Region sensed;

  friend bool operator==(const InboundRecord&, const InboundRecord&) = default;
};

struct ComponentRun {
  std::string id;
  std::string site;
  std::string type_name;
  ComponentKind kind = ComponentKind::Virtual;
  std::optional<std::string> replica_of;
  Trace trace;
  std::vector<InboundRecord> inbound;

  friend bool operator==(const ComponentRun&, const ComponentRun&) = default;
};

struct SimulationResult {
  std::uint64_t seed = 0;
  Tick horizon = 0;
  std::uint32_t tick_ms = 100;
  std::vector<ComponentRun> components;  // sorted by id
  std::vector<Message> messages;         // in send order

  friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

/// Seed of a link's random stream; depends only on the scenario seed and the
/// link id, so adding a link never perturbs the others.
std::uint64_t link_stream_seed(std::uint64_t scenario_seed, std::string_view link_id) noexcept;

/// Lockstep world state. Construction resolves the scenario and records
/// tick 0; each step() advances one tick:
///   1. messages for the actuator events and virtual sensor output of the
///      current tick are put on the links (delivery = sent + latency + jitter,
///      or dropped);
///   2. every component samples its feed for the next tick;
///   3. messages due at the next tick are delivered, sensor samples being
///      merged into the receiver's inbound record.
/// Latency-0 messages are delivered in the tick they are sent.
class Simulation {
 public:
  Simulation(const Scenario& scenario, Tick horizon, std::uint64_t seed);
  ~Simulation();
  Simulation(Simulation&&) noexcept;
  Simulation& operator=(Simulation&&) noexcept;

  Tick now() const noexcept;
  bool finished() const noexcept;
  /// Throws InvariantViolation once the horizon is reached.
  void step();

  const std::vector<ComponentRun>& components() const noexcept;
  const std::vector<Message>& messages() const noexcept;
  SimulationResult result() const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Runs [0, horizon) steps. Fully determined by (scenario, horizon, seed).
SimulationResult run(const Scenario& scenario, Tick horizon, std::uint64_t seed);

}  // namespace cvlab
