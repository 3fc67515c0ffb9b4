#include "cvlab/scene_trace.hpp"

#include <nlohmann/json.hpp>

#include "cvlab/error.hpp"

namespace cvlab {

namespace {

using nlohmann::ordered_json;

ordered_json boxes(const Region& r) {
  ordered_json out = ordered_json::array();
  for (const Box& b : r.boxes()) {
    out.push_back({b.min()[0], b.min()[1], b.min()[2], b.max()[0], b.max()[1], b.max()[2]});
  }
  return out;
}

void write_line(std::ostream& out, const ordered_json& line) {
  out << line.dump() << '\n';
  if (!out) throw Error("failed to write export stream");
}

}  // namespace

std::size_t export_scene_trace(const SimulationResult& result, std::ostream& out) {
  std::size_t lines = 0;
  for (Tick t = 0; t <= result.horizon; ++t) {
    // components are sorted by id already
    for (const ComponentRun& run : result.components) {
      const TraceRecord* rec = run.trace.at(t);
      if (rec == nullptr) continue;
      ordered_json line;
      line["tick"] = t;
      line["component"] = run.id;
      line["site"] = run.site;
      line["kind"] = to_string(run.kind);
      line["occupied"] = boxes(rec->occupied);
      line["sensed"] = boxes(rec->sensed);
      line["events"] = rec->events;
      ordered_json inbound_events = ordered_json::array();
      Region inbound_sensed;
      if (t < run.inbound.size() && run.inbound[t].tick == t) {
        for (const auto& [from, event] : run.inbound[t].events) {
          inbound_events.push_back({{"from", from}, {"event", event}});
        }
        inbound_sensed = run.inbound[t].sensed;
      }
      line["inbound_events"] = std::move(inbound_events);
      line["inbound_sensed"] = boxes(inbound_sensed);
      write_line(out, line);
      ++lines;
    }
    if (t == std::numeric_limits<Tick>::max()) break;
  }
  return lines;
}

std::size_t export_message_log(const SimulationResult& result, std::ostream& out) {
  for (const Message& m : result.messages) {
    ordered_json line;
    line["kind"] = to_string(m.kind);
    line["link"] = m.link;
    line["sender"] = m.sender;
    line["receiver"] = m.receiver;
    line["sent"] = m.sent;
    line["delivery"] = m.delivery ? ordered_json(*m.delivery) : ordered_json(nullptr);
    line["status"] = to_string(m.status);
    if (m.kind == MessageKind::ActuatorEvent) {
      line["event"] = m.event;
    } else {
      line["region"] = boxes(m.region);
    }
    write_line(out, line);
  }
  return result.messages.size();
}

}  // namespace cvlab
