#include "cvlab/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cvlab/error.hpp"

namespace cvlab {

namespace {

std::string describe(const YAML::Mark& mark, const std::string& path) {
  std::string out = "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1);
  if (!path.empty()) out += " (" + path + ")";
  return out;
}

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

class Reader {
 public:
  Scenario read(const YAML::Node& root) {
    Scenario s;
    expect_map(root, "", {"scenario", "horizon", "tick_ms", "seed", "cell_size", "sites", "behaviors", "scripts",
                          "components", "replications", "links", "checks"});
    s.name = text(required(root, "scenario", ""), "scenario");
    s.horizon = unsigned_as<Tick>(required(root, "horizon", ""), "horizon");
    if (auto n = root["tick_ms"]) s.tick_ms = unsigned_as<std::uint32_t>(n, "tick_ms");
    if (auto n = root["seed"]) s.seed = unsigned_as<std::uint64_t>(n, "seed");
    if (auto n = root["cell_size"]) s.cell_size = integer(n, "cell_size");
    if (auto n = root["sites"]) s.sites = strings(n, "sites");

    for_each(root["behaviors"], "behaviors", [&](const YAML::Node& n, const std::string& p) {
      s.behaviors.push_back(behavior(n, p, s.horizon));
    });
    for_each(root["scripts"], "scripts", [&](const YAML::Node& n, const std::string& p) {
      s.scripts.push_back(script(n, p));
    });
    for_each(root["components"], "components", [&](const YAML::Node& n, const std::string& p) {
      s.components.push_back(component(n, p));
    });
    for_each(root["replications"], "replications", [&](const YAML::Node& n, const std::string& p) {
      s.replications.push_back(replication(n, p));
    });
    for_each(root["links"], "links", [&](const YAML::Node& n, const std::string& p) {
      s.links.push_back(link(n, p));
    });
    for_each(root["checks"], "checks", [&](const YAML::Node& n, const std::string& p) {
      s.checks.push_back(check(n, p));
    });

    try {
      s.validate();
    } catch (const UnresolvedReference& e) {
      throw UnresolvedReference(strip(e), locate(e.location()));
    } catch (const InvariantViolation& e) {
      throw InvariantViolation(strip(e), locate(e.location()));
    }
    return s;
  }

 private:
  std::map<std::string, YAML::Mark> marks_;

  static std::string strip(const Error& e) {
    std::string what = e.what();
    const std::string prefix = e.location() + ": ";
    if (!e.location().empty() && what.rfind(prefix, 0) == 0) what.erase(0, prefix.size());
    return what;
  }

  // Maps a field path from Scenario::validate() to the closest recorded node.
  std::string locate(const std::string& path) const {
    for (std::string p = path; !p.empty();) {
      if (auto it = marks_.find(p); it != marks_.end()) return describe(it->second, path);
      const auto cut = p.find_last_of(".[");
      if (cut == std::string::npos) break;
      p.erase(cut);
    }
    return path;
  }

  const YAML::Node& note(const YAML::Node& n, const std::string& path) {
    marks_[path] = n.Mark();
    return n;
  }

  [[noreturn]] static void syntax(const YAML::Node& n, const std::string& path, const std::string& what) {
    throw SyntaxError(what, describe(n.Mark(), path));
  }

  [[noreturn]] static void invariant(const YAML::Node& n, const std::string& path, const std::string& what) {
    throw InvariantViolation(what, describe(n.Mark(), path));
  }

  void expect_map(const YAML::Node& n, const std::string& path, std::initializer_list<std::string_view> keys) {
    if (!n.IsMap()) syntax(n, path, "expected a mapping");
    note(n, path);
    const std::set<std::string_view> allowed(keys);
    for (const auto& kv : n) {
      if (!kv.first.IsScalar()) syntax(kv.first, path, "mapping keys must be scalars");
      const std::string key = kv.first.Scalar();
      if (!allowed.contains(key)) syntax(kv.first, child(path, key), "unknown key '" + key + "'");
      note(kv.second, child(path, key));
    }
  }

  static YAML::Node required(const YAML::Node& n, std::string_view key, const std::string& path) {
    YAML::Node v = n[std::string(key)];
    if (!v) syntax(n, child(path, key), "missing required key '" + std::string(key) + "'");
    return v;
  }

  template <typename F>
  void for_each(const YAML::Node& n, const std::string& path, F&& f) {
    if (!n) return;
    if (!n.IsSequence()) syntax(n, path, "expected a list");
    for (std::size_t i = 0; i < n.size(); ++i) f(note(n[i], item(path, i)), item(path, i));
  }

  static std::string text(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) syntax(n, path, "expected a scalar");
    return n.Scalar();
  }

  static std::int64_t integer(const YAML::Node& n, const std::string& path) {
    const std::string s = text(n, path);
    std::int64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc::result_out_of_range) invariant(n, path, "integer '" + s + "' is out of range");
    if (ec != std::errc() || end != s.data() + s.size()) syntax(n, path, "expected an integer, got '" + s + "'");
    return v;
  }

  template <typename T>
  static T unsigned_as(const YAML::Node& n, const std::string& path) {
    const std::string s = text(n, path);
    if (!s.empty() && s.front() == '-') {
      (void)integer(n, path);  // reports non-numbers as syntax errors first
      invariant(n, path, "value must be non-negative, got " + s);
    }
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc::result_out_of_range) invariant(n, path, "integer '" + s + "' is out of range");
    if (ec != std::errc() || end != s.data() + s.size()) syntax(n, path, "expected an integer, got '" + s + "'");
    if (v > std::numeric_limits<T>::max()) invariant(n, path, "integer '" + s + "' is out of range");
    return static_cast<T>(v);
  }

  static double real(const YAML::Node& n, const std::string& path) {
    const std::string s = text(n, path);
    double v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) syntax(n, path, "expected a number, got '" + s + "'");
    return v;
  }

  static std::vector<std::string> strings(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) syntax(n, path, "expected a list");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(text(n[i], item(path, i)));
    return out;
  }

  static std::vector<std::int64_t> integers(const YAML::Node& n, const std::string& path, std::size_t count) {
    if (!n.IsSequence() || n.size() != count) {
      syntax(n, path, "expected a list of " + std::to_string(count) + " integers");
    }
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(integer(n[i], item(path, i)));
    return out;
  }

  static Vec3 vec3(const YAML::Node& n, const std::string& path) {
    const auto v = integers(n, path, 3);
    return {v[0], v[1], v[2]};
  }

  static Box box(const YAML::Node& n, const std::string& path) {
    const auto v = integers(n, path, 6);
    try {
      return Box({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
    } catch (const InvariantViolation& e) {
      invariant(n, path, e.what());
    }
  }

  static Region region(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) syntax(n, path, "expected a list of boxes");
    std::vector<Box> boxes;
    for (std::size_t i = 0; i < n.size(); ++i) boxes.push_back(box(n[i], item(path, i)));
    return Region(std::move(boxes));
  }

  static TickInterval interval(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence() || n.size() != 2) syntax(n, path, "expected [first, last]");
    TickInterval iv{unsigned_as<Tick>(n[0], item(path, 0)), unsigned_as<Tick>(n[1], item(path, 1))};
    if (iv.first > iv.last) invariant(n, path, "interval has first > last");
    return iv;
  }

  static std::vector<TickInterval> intervals(const YAML::Node& n, const std::string& path) {
    if (!n.IsSequence()) syntax(n, path, "expected a list of [first, last] intervals");
    std::vector<TickInterval> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(interval(n[i], item(path, i)));
    return out;
  }

  BehaviorType behavior(const YAML::Node& n, const std::string& path, Tick horizon) {
    expect_map(n, path, {"id", "modes", "schedule", "frame", "clauses"});
    BehaviorType bt;
    bt.id = text(required(n, "id", path), child(path, "id"));
    bt.horizon = horizon;
    if (auto m = n["modes"]) {
      for (auto& name : strings(m, child(path, "modes"))) bt.modes.insert(name);
    } else {
      bt.modes = {"run"};
    }
    if (auto sched = n["schedule"]) {
      for_each(sched, child(path, "schedule"), [&](const YAML::Node& seg, const std::string& p) {
        expect_map(seg, p, {"from", "mode"});
        bt.schedule.push_back(ModeSegment{unsigned_as<Tick>(required(seg, "from", p), child(p, "from")),
                                          text(required(seg, "mode", p), child(p, "mode"))});
      });
    } else if (!bt.modes.empty()) {
      bt.schedule = {ModeSegment{0, *bt.modes.begin()}};
    }
    if (auto f = n["frame"]) bt.frame = vec3(f, child(path, "frame"));
    for_each(n["clauses"], child(path, "clauses"), [&](const YAML::Node& c, const std::string& p) {
      expect_map(c, p, {"ticks", "modes", "occupy", "sense", "emit"});
      Clause clause;
      clause.guard.ticks = c["ticks"] ? interval(c["ticks"], child(p, "ticks"))
                                      : TickInterval{0, std::numeric_limits<Tick>::max()};
      if (auto m = c["modes"]) {
        for (auto& name : strings(m, child(p, "modes"))) clause.guard.modes.insert(name);
      } else {
        clause.guard.modes = bt.modes;
      }
      const int effects = (c["occupy"] ? 1 : 0) + (c["sense"] ? 1 : 0) + (c["emit"] ? 1 : 0);
      if (effects != 1) syntax(c, p, "a clause needs exactly one of 'occupy', 'sense' or 'emit'");
      if (auto r = c["occupy"]) clause.effect = Occupy{region(r, child(p, "occupy"))};
      if (auto r = c["sense"]) clause.effect = SensorCoverage{region(r, child(p, "sense"))};
      if (auto e = c["emit"]) clause.effect = Emits{text(e, child(p, "emit"))};
      bt.clauses.push_back(std::move(clause));
    });
    return bt;
  }

  Script script(const YAML::Node& n, const std::string& path) {
    expect_map(n, path, {"id", "segments"});
    Script s;
    s.id = text(required(n, "id", path), child(path, "id"));
    for_each(n["segments"], child(path, "segments"), [&](const YAML::Node& seg, const std::string& p) {
      expect_map(seg, p, {"ticks", "occupy", "sense", "emit"});
      ScriptSegment out;
      out.ticks = interval(required(seg, "ticks", p), child(p, "ticks"));
      if (auto r = seg["occupy"]) out.occupied = region(r, child(p, "occupy"));
      if (auto r = seg["sense"]) out.sensed = region(r, child(p, "sense"));
      if (auto e = seg["emit"]) {
        for (auto& name : strings(e, child(p, "emit"))) out.events.insert(name);
      }
      s.segments.push_back(std::move(out));
    });
    return s;
  }

  Component component(const YAML::Node& n, const std::string& path) {
    expect_map(n, path, {"id", "site", "type", "kind", "behavior", "script", "placement"});
    Component c;
    c.id = text(required(n, "id", path), child(path, "id"));
    c.site = text(required(n, "site", path), child(path, "site"));
    if (auto t = n["type"]) c.type_name = text(t, child(path, "type"));
    const std::string kind = text(required(n, "kind", path), child(path, "kind"));
    if (kind == "physical") {
      c.kind = ComponentKind::Physical;
    } else if (kind == "virtual") {
      c.kind = ComponentKind::Virtual;
    } else {
      syntax(n["kind"], child(path, "kind"), "kind must be 'physical' or 'virtual', got '" + kind + "'");
    }
    if (auto b = n["behavior"]) c.behavior = text(b, child(path, "behavior"));
    if (auto s = n["script"]) c.script = text(s, child(path, "script"));
    if (auto p = n["placement"]) c.placement = vec3(p, child(path, "placement"));
    return c;
  }

  ReplicationDirective replication(const YAML::Node& n, const std::string& path) {
    expect_map(n, path, {"source", "count", "site", "placements"});
    ReplicationDirective d;
    d.source = text(required(n, "source", path), child(path, "source"));
    d.site = text(required(n, "site", path), child(path, "site"));
    for_each(required(n, "placements", path), child(path, "placements"),
             [&](const YAML::Node& p, const std::string& where) { d.placements.push_back(vec3(p, where)); });
    d.count = n["count"] ? unsigned_as<std::size_t>(n["count"], child(path, "count")) : d.placements.size();
    return d;
  }

  Link link(const YAML::Node& n, const std::string& path) {
    expect_map(n, path, {"from", "to", "latency", "jitter", "drop"});
    Link l;
    l.from = text(required(n, "from", path), child(path, "from"));
    l.to = text(required(n, "to", path), child(path, "to"));
    if (auto v = n["latency"]) l.latency = unsigned_as<Tick>(v, child(path, "latency"));
    if (auto v = n["jitter"]) l.jitter = unsigned_as<Tick>(v, child(path, "jitter"));
    if (auto v = n["drop"]) l.drop = real(v, child(path, "drop"));
    return l;
  }

  CheckSpec check(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) syntax(n, path, "expected a mapping");
    const std::string kind = text(required(n, "kind", path), child(path, "kind"));
    if (kind == "collision") {
      expect_map(n, path, {"kind"});
      return CollisionCheck{};
    }
    if (kind == "sensor_coverage") {
      expect_map(n, path, {"kind", "target", "ticks"});
      return SensorCoverageCheck{region(required(n, "target", path), child(path, "target")),
                                 intervals(required(n, "ticks", path), child(path, "ticks"))};
    }
    if (kind == "tool_workpiece") {
      expect_map(n, path, {"kind", "tool", "workpiece", "schedule"});
      return ToolWorkpieceCheck{text(required(n, "tool", path), child(path, "tool")),
                                text(required(n, "workpiece", path), child(path, "workpiece")),
                                intervals(required(n, "schedule", path), child(path, "schedule"))};
    }
    if (kind == "replacement") {
      expect_map(n, path, {"kind", "old", "new"});
      return ReplacementCheck{text(required(n, "old", path), child(path, "old")),
                              text(required(n, "new", path), child(path, "new"))};
    }
    syntax(n["kind"], child(path, "kind"), "unknown check kind '" + kind + "'");
  }
};

void emit_vec3(YAML::Emitter& out, const Vec3& v) {
  out << YAML::Flow << YAML::BeginSeq << v[0] << v[1] << v[2] << YAML::EndSeq;
}

void emit_box(YAML::Emitter& out, const Box& b) {
  out << YAML::Flow << YAML::BeginSeq;
  for (Coord c : b.min()) out << c;
  for (Coord c : b.max()) out << c;
  out << YAML::EndSeq;
}

void emit_region(YAML::Emitter& out, const Region& r) {
  out << YAML::BeginSeq;
  for (const Box& b : r.boxes()) emit_box(out, b);
  out << YAML::EndSeq;
}

void emit_interval(YAML::Emitter& out, const TickInterval& iv) {
  out << YAML::Flow << YAML::BeginSeq << iv.first << iv.last << YAML::EndSeq;
}

template <typename Range>
void emit_strings(YAML::Emitter& out, const Range& items) {
  out << YAML::Flow << YAML::BeginSeq;
  for (const auto& s : items) out << s;
  out << YAML::EndSeq;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw SyntaxError(e.msg, describe(e.mark, ""));
  }
  if (!root || root.IsNull()) throw SyntaxError("empty scenario document", "line 1, column 1");
  return Reader{}.read(root);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SyntaxError("cannot read scenario file", path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str());
  } catch (const SyntaxError& e) {
    throw SyntaxError(e.what(), path.string());
  } catch (const UnresolvedReference& e) {
    throw UnresolvedReference(e.what(), path.string());
  } catch (const InvariantViolation& e) {
    throw InvariantViolation(e.what(), path.string());
  }
}

std::string serialize_scenario(const Scenario& s) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "scenario" << YAML::Value << s.name;
  out << YAML::Key << "horizon" << YAML::Value << s.horizon;
  out << YAML::Key << "tick_ms" << YAML::Value << s.tick_ms;
  out << YAML::Key << "seed" << YAML::Value << s.seed;
  out << YAML::Key << "cell_size" << YAML::Value << s.cell_size;
  out << YAML::Key << "sites" << YAML::Value;
  emit_strings(out, s.sites);

  out << YAML::Key << "behaviors" << YAML::Value << YAML::BeginSeq;
  for (const BehaviorType& bt : s.behaviors) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << bt.id;
    out << YAML::Key << "modes" << YAML::Value;
    emit_strings(out, bt.modes);
    out << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
    for (const ModeSegment& seg : bt.schedule) {
      out << YAML::Flow << YAML::BeginMap << YAML::Key << "from" << YAML::Value << seg.start << YAML::Key << "mode"
          << YAML::Value << seg.mode << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "frame" << YAML::Value;
    emit_vec3(out, bt.frame);
    out << YAML::Key << "clauses" << YAML::Value << YAML::BeginSeq;
    for (const Clause& c : bt.clauses) {
      out << YAML::BeginMap;
      out << YAML::Key << "ticks" << YAML::Value;
      emit_interval(out, c.guard.ticks);
      out << YAML::Key << "modes" << YAML::Value;
      emit_strings(out, c.guard.modes);
      std::visit(
          [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, Occupy>) {
              out << YAML::Key << "occupy" << YAML::Value;
              emit_region(out, e.region);
            } else if constexpr (std::is_same_v<T, SensorCoverage>) {
              out << YAML::Key << "sense" << YAML::Value;
              emit_region(out, e.region);
            } else {
              out << YAML::Key << "emit" << YAML::Value << e.event;
            }
          },
          c.effect);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "scripts" << YAML::Value << YAML::BeginSeq;
  for (const Script& sc : s.scripts) {
    out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << sc.id;
    out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
    for (const ScriptSegment& seg : sc.segments) {
      out << YAML::BeginMap << YAML::Key << "ticks" << YAML::Value;
      emit_interval(out, seg.ticks);
      out << YAML::Key << "occupy" << YAML::Value;
      emit_region(out, seg.occupied);
      out << YAML::Key << "sense" << YAML::Value;
      emit_region(out, seg.sensed);
      out << YAML::Key << "emit" << YAML::Value;
      emit_strings(out, seg.events);
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
  for (const Component& c : s.components) {
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << c.id;
    out << YAML::Key << "site" << YAML::Value << c.site;
    if (!c.type_name.empty()) out << YAML::Key << "type" << YAML::Value << c.type_name;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(c.kind));
    if (!c.behavior.empty()) out << YAML::Key << "behavior" << YAML::Value << c.behavior;
    if (!c.script.empty()) out << YAML::Key << "script" << YAML::Value << c.script;
    out << YAML::Key << "placement" << YAML::Value;
    emit_vec3(out, c.placement);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "replications" << YAML::Value << YAML::BeginSeq;
  for (const ReplicationDirective& d : s.replications) {
    out << YAML::BeginMap;
    out << YAML::Key << "source" << YAML::Value << d.source;
    out << YAML::Key << "count" << YAML::Value << d.count;
    out << YAML::Key << "site" << YAML::Value << d.site;
    out << YAML::Key << "placements" << YAML::Value << YAML::BeginSeq;
    for (const Vec3& p : d.placements) emit_vec3(out, p);
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
  for (const Link& l : s.links) {
    out << YAML::BeginMap;
    out << YAML::Key << "from" << YAML::Value << l.from;
    out << YAML::Key << "to" << YAML::Value << l.to;
    out << YAML::Key << "latency" << YAML::Value << l.latency;
    out << YAML::Key << "jitter" << YAML::Value << l.jitter;
    out << YAML::Key << "drop" << YAML::Value << l.drop;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "checks" << YAML::Value << YAML::BeginSeq;
  for (const CheckSpec& check : s.checks) {
    out << YAML::BeginMap << YAML::Key << "kind" << YAML::Value << std::string(check_name(check));
    std::visit(
        [&](const auto& spec) {
          using T = std::decay_t<decltype(spec)>;
          if constexpr (std::is_same_v<T, SensorCoverageCheck>) {
            out << YAML::Key << "target" << YAML::Value;
            emit_region(out, spec.target);
            out << YAML::Key << "ticks" << YAML::Value << YAML::BeginSeq;
            for (const TickInterval& iv : spec.ticks) emit_interval(out, iv);
            out << YAML::EndSeq;
          } else if constexpr (std::is_same_v<T, ToolWorkpieceCheck>) {
            out << YAML::Key << "tool" << YAML::Value << spec.tool;
            out << YAML::Key << "workpiece" << YAML::Value << spec.workpiece;
            out << YAML::Key << "schedule" << YAML::Value << YAML::BeginSeq;
            for (const TickInterval& iv : spec.schedule) emit_interval(out, iv);
            out << YAML::EndSeq;
          } else if constexpr (std::is_same_v<T, ReplacementCheck>) {
            out << YAML::Key << "old" << YAML::Value << spec.old_component;
            out << YAML::Key << "new" << YAML::Value << spec.new_behavior;
          }
        },
        check);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace cvlab
