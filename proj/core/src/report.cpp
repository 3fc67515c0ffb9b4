#include "cvlab/report.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cvlab/error.hpp"

namespace cvlab {

namespace {

using nlohmann::ordered_json;

ordered_json box_json(const Box& b) {
  return {b.min()[0], b.min()[1], b.min()[2], b.max()[0], b.max()[1], b.max()[2]};
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json out;
  out["status"] = to_string(v.status);
  out["explanation"] = v.explanation;
  if (!v.witness) {
    out["witness"] = nullptr;
    return out;
  }
  const Witness& w = *v.witness;
  ordered_json wj;
  wj["tick"] = w.tick;
  wj["kind"] = to_string(w.kind);
  wj["components"] = w.components;
  ordered_json region = ordered_json::array();
  for (const Box& b : w.region.boxes()) region.push_back(box_json(b));
  wj["region"] = std::move(region);
  wj["event"] = w.event ? ordered_json(*w.event) : ordered_json(nullptr);
  wj["relation"] = w.relation ? ordered_json(to_string(*w.relation)) : ordered_json(nullptr);
  wj["cell"] = w.cell ? box_json(*w.cell) : ordered_json(nullptr);
  out["witness"] = std::move(wj);
  return out;
}

std::string box_text(const Box& b) {
  std::ostringstream s;
  s << "[" << b.min()[0] << "," << b.min()[1] << "," << b.min()[2] << " .. " << b.max()[0] << "," << b.max()[1]
    << "," << b.max()[2] << "]";
  return s.str();
}

}  // namespace

bool Report::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.verdict.passed(); });
}

Report make_report(const Scenario& scenario, std::vector<CheckOutcome> checks) {
  Report r;
  r.meta.scenario = scenario.name;
  r.meta.seed = scenario.seed;
  r.meta.horizon = scenario.horizon;
  r.meta.tick_ms = scenario.tick_ms;
  r.meta.cell_size = scenario.cell_size;
  r.checks = std::move(checks);
  return r;
}

std::string to_json(const Report& report) {
  ordered_json out;
  out["scenario"] = report.meta.scenario;
  out["seed"] = report.meta.seed;
  out["horizon"] = report.meta.horizon;
  out["tick_ms"] = report.meta.tick_ms;
  out["cell_size"] = report.meta.cell_size;
  out["tool_version"] = report.meta.tool_version;
  out["passed"] = report.passed();
  ordered_json checks = ordered_json::array();
  for (const CheckOutcome& c : report.checks) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["engine"] = c.engine;
    cj.update(verdict_json(c.verdict));
    if (c.grid) cj["grid"] = verdict_json(*c.grid);
    checks.push_back(std::move(cj));
  }
  out["checks"] = std::move(checks);
  return out.dump(2) + "\n";
}

std::string to_text(const Report& report) {
  std::ostringstream s;
  s << "scenario " << report.meta.scenario << " (seed " << report.meta.seed << ", horizon " << report.meta.horizon
    << " ticks of " << report.meta.tick_ms << " ms)\n";
  std::size_t failed = 0;
  for (const CheckOutcome& c : report.checks) {
    s << (c.verdict.passed() ? "PASS " : "FAIL ") << c.name << " [" << c.engine << "]";
    if (!c.verdict.explanation.empty()) s << ": " << c.verdict.explanation;
    s << "\n";
    if (const auto& w = c.verdict.witness) {
      ++failed;
      s << "  tick " << w->tick << ", " << to_string(w->kind);
      if (!w->components.empty()) {
        s << ", components";
        for (const auto& id : w->components) s << " " << id;
      }
      if (w->event) s << ", event " << *w->event;
      if (w->relation) s << ", relation " << to_string(*w->relation);
      if (w->cell) s << ", cell " << box_text(*w->cell);
      for (const Box& b : w->region.boxes()) s << "\n  region " << box_text(b);
      s << "\n";
    }
  }
  s << report.checks.size() - failed << "/" << report.checks.size() << " checks passed\n";
  return s.str();
}

void write_report(const Report& report, std::ostream& out, bool json) {
  out << (json ? to_json(report) : to_text(report));
  out.flush();
  if (!out) throw Error("failed to write report");
}

}  // namespace cvlab
