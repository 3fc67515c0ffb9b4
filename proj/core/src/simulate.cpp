#include "cvlab/simulate.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "cvlab/error.hpp"

namespace cvlab {

namespace {

// FNV-1a: stable across platforms and standard libraries, unlike std::hash.
std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TraceRecord ScriptedFeed::sample(Tick t) const {
  if (const TraceRecord* r = trace_.at(t)) return *r;
  return TraceRecord{t, {}, {}, {}};
}

TraceRecord BehaviorFeed::sample(Tick t) const {
  return TraceRecord{t, occupancy_at(bt_, t), sensor_coverage_at(bt_, t), events_at(bt_, t)};
}

std::unique_ptr<ActuatorFeed> make_feed(const ResolvedComponent& component) {
  if (component.script) return std::make_unique<ScriptedFeed>(*component.script);
  return std::make_unique<BehaviorFeed>(component.behavior);
}

std::vector<ResolvedComponent> replicate(const ResolvedComponent& source, const ReplicationDirective& directive) {
  const std::string where = "replication of '" + source.id + "'";
  if (directive.count == 0) throw InvariantViolation("replica count must be positive", where);
  if (directive.count != directive.placements.size()) {
    throw InvariantViolation("replica count does not match the number of placements", where);
  }
  if (std::set<Vec3>(directive.placements.begin(), directive.placements.end()).size() != directive.placements.size()) {
    throw InvariantViolation("replica placements must be pairwise distinct", where);
  }

  std::vector<ResolvedComponent> out;
  out.reserve(directive.count);
  for (std::size_t k = 0; k < directive.count; ++k) {
    const Vec3& offset = directive.placements[k];
    ResolvedComponent r;
    r.id = source.id + "#" + std::to_string(k + 1);
    r.site = directive.site;
    r.type_name = source.type_name;
    r.kind = ComponentKind::Virtual;
    r.behavior = translate_bt(source.behavior, offset);
    r.behavior.id = r.id;
    if (source.declared) r.declared = translate_bt(*source.declared, offset);
    if (source.script) {
      r.script = source.script->translated(offset);
      r.script->component = r.id;
    }
    r.replica_of = source.id;
    out.push_back(std::move(r));
  }
  return out;
}

Region composed_sensor_stream(std::span<const ResolvedComponent> components, Tick t) {
  std::vector<Region> parts;
  parts.reserve(components.size());
  for (const ResolvedComponent& c : components) parts.push_back(sensor_coverage_at(c.behavior, t));
  return region_union(parts);
}

std::string_view to_string(MessageKind kind) noexcept {
  return kind == MessageKind::ActuatorEvent ? "actuator_event" : "sensor_sample";
}

std::string_view to_string(DeliveryStatus status) noexcept {
  switch (status) {
    case DeliveryStatus::Delivered: return "delivered";
    case DeliveryStatus::Dropped: return "dropped";
    case DeliveryStatus::InFlight: return "in_flight";
  }
  return "unknown";
}

std::uint64_t link_stream_seed(std::uint64_t scenario_seed, std::string_view link_id) noexcept {
  return splitmix64(scenario_seed ^ fnv1a(link_id));
}

struct Simulation::State {
  Tick horizon = 0;
  std::uint64_t seed = 0;
  std::uint32_t tick_ms = 100;
  Tick now = 0;

  std::vector<ResolvedComponent> resolved;
  std::vector<std::unique_ptr<ActuatorFeed>> feeds;
  std::vector<ComponentRun> runs;
  std::map<std::string, std::size_t, std::less<>> index;

  std::vector<Link> links;
  std::vector<std::mt19937_64> streams;

  std::vector<Message> messages;
  std::multimap<Tick, std::size_t> pending;  // delivery tick -> message index

  void sample(Tick t) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      runs[i].trace.records.push_back(feeds[i]->sample(t));
      runs[i].inbound.push_back(InboundRecord{t, {}, {}});
    }
  }

  void deliver(Message& m) {
    InboundRecord& in = runs[index.find(m.receiver)->second].inbound.back();
    if (m.kind == MessageKind::ActuatorEvent) {
      in.events.emplace_back(m.sender, m.event);
      std::sort(in.events.begin(), in.events.end());
    } else {
      in.sensed = region_union(in.sensed, m.region);
    }
    m.status = DeliveryStatus::Delivered;
  }

  void enqueue(std::size_t link, Message m) {
    const Link& l = links[link];
    std::mt19937_64& rng = streams[link];
    // Both draws are always taken so drop and jitter outcomes stay aligned
    // across parameter changes.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const std::uint64_t extra = rng() % (static_cast<std::uint64_t>(l.jitter) + 1);
    if (u < l.drop) {
      m.status = DeliveryStatus::Dropped;
      messages.push_back(std::move(m));
      return;
    }
    const std::uint64_t due = static_cast<std::uint64_t>(m.sent) + l.latency + extra;
    m.delivery = static_cast<Tick>(std::min<std::uint64_t>(due, std::numeric_limits<Tick>::max()));
    m.status = DeliveryStatus::InFlight;
    messages.push_back(std::move(m));
    if (*messages.back().delivery == now) {
      deliver(messages.back());
    } else {
      pending.emplace(*messages.back().delivery, messages.size() - 1);
    }
  }

  void send(Tick t) {
    for (std::size_t li = 0; li < links.size(); ++li) {
      const Link& l = links[li];
      std::vector<std::size_t> senders;
      std::vector<std::size_t> receivers;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        if (runs[i].site == l.from) senders.push_back(i);
        if (runs[i].site == l.to) receivers.push_back(i);
      }
      if (senders.empty() || receivers.empty()) continue;

      for (std::size_t s : senders) {
        for (const EventId& e : runs[s].trace.records.back().events) {
          for (std::size_t r : receivers) {
            Message m;
            m.kind = MessageKind::ActuatorEvent;
            m.link = l.id();
            m.sender = runs[s].id;
            m.receiver = runs[r].id;
            m.sent = t;
            m.event = e;
            enqueue(li, std::move(m));
          }
        }
      }

      // Virtual sensor output of the sending site, composed, goes to the
      // physical components of the receiving site.
      std::vector<Region> virtual_sensed;
      for (std::size_t s : senders) {
        if (runs[s].kind != ComponentKind::Virtual) continue;
        virtual_sensed.push_back(runs[s].trace.records.back().sensed);
      }
      const Region composed = region_union(virtual_sensed);
      if (composed.empty()) continue;
      for (std::size_t r : receivers) {
        if (runs[r].kind != ComponentKind::Physical) continue;
        Message m;
        m.kind = MessageKind::SensorSample;
        m.link = l.id();
        m.sender = l.from;
        m.receiver = runs[r].id;
        m.sent = t;
        m.region = composed;
        enqueue(li, std::move(m));
      }
    }
  }

  void deliver_due(Tick t) {
    auto [first, last] = pending.equal_range(t);
    std::vector<std::size_t> due;
    for (auto it = first; it != last; ++it) due.push_back(it->second);
    pending.erase(first, last);
    std::sort(due.begin(), due.end());
    for (std::size_t i : due) deliver(messages[i]);
  }
};

Simulation::Simulation(const Scenario& scenario, Tick horizon, std::uint64_t seed)
    : state_(std::make_unique<State>()) {
  Scenario copy = scenario;
  copy.horizon = horizon;
  for (BehaviorType& bt : copy.behaviors) bt.horizon = std::max(bt.horizon, horizon);

  State& s = *state_;
  s.horizon = horizon;
  s.seed = seed;
  s.tick_ms = scenario.tick_ms;
  s.resolved = resolve_components(copy);
  for (const ResolvedComponent& c : s.resolved) {
    s.index.emplace(c.id, s.runs.size());
    s.feeds.push_back(make_feed(c));
    s.runs.push_back(ComponentRun{c.id, c.site, c.type_name, c.kind, c.replica_of, Trace{c.id, {}}, {}});
  }
  s.links = copy.links;
  std::sort(s.links.begin(), s.links.end(),
            [](const Link& a, const Link& b) { return std::tie(a.from, a.to) < std::tie(b.from, b.to); });
  for (const Link& l : s.links) s.streams.emplace_back(link_stream_seed(seed, l.id()));
  s.sample(0);
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

Tick Simulation::now() const noexcept { return state_->now; }

bool Simulation::finished() const noexcept { return state_->now >= state_->horizon; }

void Simulation::step() {
  State& s = *state_;
  if (finished()) throw InvariantViolation("simulation already reached its horizon");
  s.send(s.now);
  ++s.now;
  s.sample(s.now);
  s.deliver_due(s.now);
}

const std::vector<ComponentRun>& Simulation::components() const noexcept { return state_->runs; }

const std::vector<Message>& Simulation::messages() const noexcept { return state_->messages; }

SimulationResult Simulation::result() const {
  return SimulationResult{state_->seed, state_->horizon, state_->tick_ms, state_->runs, state_->messages};
}

SimulationResult run(const Scenario& scenario, Tick horizon, std::uint64_t seed) {
  Simulation sim(scenario, horizon, seed);
  while (!sim.finished()) sim.step();
  return sim.result();
}

}  // namespace cvlab
