// Acceptance suite: one line per criterion, "PASS" or "FAIL", followed by the
// measured numbers. Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "builders.hpp"
#include "cvlab/error.hpp"
#include "cvlab/report.hpp"
#include "cvlab/scenario_io.hpp"
#include "cvlab/scene_trace.hpp"
#include "cvlab/simulate.hpp"
#include "cvlab/typecheck.hpp"
#include "cvlab/verify.hpp"
#include "cvlab_cli/cli.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace cvlab;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double kGeometrySeconds = 5.0;
constexpr double kCrossCheckSeconds = 30.0;
constexpr double kScenarioSeconds = 5.0;
constexpr int kGeometryPairs = 500;
constexpr int kCrossCheckScenarios = 200;
constexpr int kTypeLawCases = 100;
constexpr int kExecutorCases = 200;
constexpr int kRoundTripCases = 100;
constexpr std::size_t kMalformedCases = 20;
constexpr int kReplacementCases = 50;

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path source_dir() {
  const char* dir = std::getenv("CVLAB_SOURCE_DIR");
  return dir != nullptr ? dir : CVLAB_SOURCE_DIR;
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f s", s);
  return buf;
}

// --- 1 ----------------------------------------------------------------------

Outcome geometry_oracle() {
  const auto start = std::chrono::steady_clock::now();
  gen::Rng rng(1001);
  int agree = 0;
  for (int i = 0; i < kGeometryPairs; ++i) {
    const Box a = gen::box(rng, 0, 8);
    const Box b = gen::box(rng, 0, 8);
    const Region ra{a};
    const Region rb{b};
    const oracle::Boxes oa{a};
    const oracle::Boxes ob{b};
    const bool ok = rcc_relate(ra, rb) == oracle::rcc(oa, ob) &&
                    region_contains(ra, rb) == oracle::contains(oa, ob) &&
                    region_contains(rb, ra) == oracle::contains(ob, oa) &&
                    region_intersects(ra, rb) == oracle::intersects(oa, ob) &&
                    region_overlap_volume_positive(ra, rb) == oracle::overlap_positive(oa, ob) &&
                    (box_intersection(a, b) == region_intersection(ra, rb));
    agree += ok ? 1 : 0;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {agree == kGeometryPairs && secs < kGeometrySeconds,
          std::to_string(agree) + "/" + std::to_string(kGeometryPairs) + " pairs agree, " + fmt_seconds(secs) +
              " (limit " + fmt_seconds(kGeometrySeconds) + ")"};
}

// --- 2 ----------------------------------------------------------------------

Outcome engine_cross_check() {
  const auto start = std::chrono::steady_clock::now();
  gen::Rng rng(2002);
  gen::ScenarioShape shape;
  shape.max_horizon = 20;
  shape.max_components = 4;
  shape.space = 16;
  shape.links = false;
  shape.checks = false;
  int agree = 0;
  int failing = 0;
  for (int i = 0; i < kCrossCheckScenarios; ++i) {
    const Scenario s = gen::scenario(rng, shape);
    const auto comps = resolve_components(s);
    const Verdict sweep = check_collision(comps, s.horizon);
    GridOptions options;
    options.cell_size = 1;
    options.space = Box({0, 0, 0}, {16, 16, 16});
    const Verdict grid = check_collision_grid(comps, s.horizon, options);
    bool ok = sweep.status == grid.status;
    if (ok && !sweep.passed()) {
      ok = sweep.witness->tick == grid.witness->tick;
      ++failing;
    }
    agree += ok ? 1 : 0;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {agree == kCrossCheckScenarios && secs < kCrossCheckSeconds,
          std::to_string(agree) + "/" + std::to_string(kCrossCheckScenarios) + " scenarios agree (" +
              std::to_string(failing) + " colliding), " + fmt_seconds(secs) + " (limit " +
              fmt_seconds(kCrossCheckSeconds) + ")"};
}

// --- 3 ----------------------------------------------------------------------

Outcome type_laws() {
  gen::Rng rng(3003);
  int violations = 0;
  int premises = 0;
  for (int i = 0; i < kTypeLawCases; ++i) {
    gen::BtShape shape;
    shape.horizon = static_cast<Tick>(rng.between(0, 20));
    // Chains built to satisfy the premise, plus unrelated triples.
    const BehaviorType a = gen::behavior(rng, "a", shape);
    const BehaviorType b = gen::refinement_of(rng, a, "b", shape);
    const BehaviorType c = gen::refinement_of(rng, b, "c", shape);
    const BehaviorType x = gen::behavior(rng, "x", shape);
    const BehaviorType y = gen::behavior(rng, "y", shape);
    const BehaviorType z = gen::behavior(rng, "z", shape);
    const Tick h = shape.horizon;
    for (const BehaviorType* t : {&a, &b, &c, &x, &y, &z}) violations += refines(*t, *t, h).passed() ? 0 : 1;
    auto transitive = [&](const BehaviorType& p, const BehaviorType& q, const BehaviorType& r) {
      if (refines(p, q, h).passed() && refines(q, r, h).passed()) {
        ++premises;
        violations += refines(p, r, h).passed() ? 0 : 1;
      }
    };
    transitive(c, b, a);
    transitive(z, y, x);
  }
  for (int i = 0; i < kTypeLawCases; ++i) {
    gen::BtShape shape;
    shape.horizon = static_cast<Tick>(rng.between(0, 20));
    const BehaviorType a = gen::behavior(rng, "a", shape);
    const BehaviorType b = gen::behavior(rng, "b", shape);
    const Verdict ab = compatible(a, b, shape.horizon);
    const Verdict ba = compatible(b, a, shape.horizon);
    const bool same = ab.status == ba.status && (ab.passed() || ab.witness->tick == ba.witness->tick);
    violations += same ? 0 : 1;
  }
  int substitution_premises = 0;
  for (int i = 0; i < kTypeLawCases; ++i) {
    gen::BtShape shape;
    shape.horizon = static_cast<Tick>(rng.between(0, 20));
    const BehaviorType super = gen::behavior(rng, "super", shape);
    const BehaviorType sub = gen::refinement_of(rng, super, "sub", shape);
    // Neighbors are drawn until one is compatible with super, so the premise
    // holds in every case.
    BehaviorType neighbor;
    for (int tries = 0; tries < 50; ++tries) {
      neighbor = gen::behavior(rng, "neighbor", shape);
      if (compatible(super, neighbor, shape.horizon).passed()) break;
    }
    if (!refines(sub, super, shape.horizon).passed()) {
      ++violations;
      continue;
    }
    if (compatible(super, neighbor, shape.horizon).passed()) {
      ++substitution_premises;
      violations += compatible(sub, neighbor, shape.horizon).passed() ? 0 : 1;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations (" + std::to_string(premises) +
                               " transitivity premises, " + std::to_string(kTypeLawCases) + " symmetry pairs, " +
                               std::to_string(substitution_premises) + " substitution premises)"};
}

// --- 4 ----------------------------------------------------------------------

std::string serialized_run(const Scenario& s, std::uint64_t seed) {
  std::ostringstream out;
  const SimulationResult r = run(s, s.horizon, seed);
  export_scene_trace(r, out);
  export_message_log(r, out);
  out << to_json(make_report(s, run_checks(s, {})));
  return out.str();
}

// Positive-volume overlap by direct box arithmetic. The sampling oracle is
// too slow at millimeter scale.
bool boxes_overlap(const Region& a, const Region& b) {
  for (const Box& x : a.boxes()) {
    for (const Box& y : b.boxes()) {
      bool positive = true;
      for (int d = 0; d < 3; ++d) positive = positive && std::min(x.max()[d], y.max()[d]) > std::max(x.min()[d], y.min()[d]);
      if (positive) return true;
    }
  }
  return false;
}

Outcome shipped_scenario_end_to_end() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> problems;
  const Scenario s = load_scenario(source_dir() / "scenarios" / "cyber_virtual.yaml");

  const bool deterministic = serialized_run(s, 7) == serialized_run(s, 7);
  if (!deterministic) problems.push_back("reruns differ");

  const SimulationResult r = run(s, s.horizon, 7);
  const Component& b = *s.find_component(s.replications.at(0).source);
  const BehaviorType declared = *resolve_component(s, b).declared;
  int conforming = 0;
  int replicas = 0;
  for (const ComponentRun& c : r.components) {
    if (!c.replica_of) continue;
    ++replicas;
    const std::size_t k = std::stoul(c.id.substr(c.id.find('#') + 1)) - 1;
    conforming += conforms(c.trace, translate_bt(declared, s.replications[0].placements[k]), s.horizon).passed();
  }
  if (replicas != 3 || conforming != replicas) problems.push_back("replica conformance");
  if (!check_collision(s, s.horizon).passed()) problems.push_back("collision check failed");

  // Move the first replica into the lane swept by A's arm.
  Scenario bad = s;
  bad.replications[0].placements[0] = {200, -4950, 0};
  const Verdict v = check_collision(bad, bad.horizon);
  Tick witness = 0;
  if (v.passed()) {
    problems.push_back("perturbed placement still passes");
  } else {
    witness = v.witness->tick;
    // Rescan every pair at every tick up to the witness.
    const auto comps = resolve_components(bad);
    std::optional<Tick> first;
    for (Tick t = 0; t <= bad.horizon && !first; ++t) {
      for (std::size_t i = 0; i < comps.size() && !first; ++i) {
        for (std::size_t j = i + 1; j < comps.size() && !first; ++j) {
          if (boxes_overlap(occupancy_at(comps[i].behavior, t), occupancy_at(comps[j].behavior, t))) {
            first = t;
          }
        }
      }
    }
    if (first != witness) problems.push_back("witness is not the earliest collision");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= kScenarioSeconds) problems.push_back("too slow");
  std::string detail = std::string(deterministic ? "deterministic" : "NOT deterministic") + ", " +
                       std::to_string(conforming) + "/" + std::to_string(replicas) + " replicas conform, " +
                       "perturbed witness tick " + std::to_string(witness) + ", " + fmt_seconds(secs) + " (limit " +
                       fmt_seconds(kScenarioSeconds) + ")";
  for (const auto& p : problems) detail += "; " + p;
  return {problems.empty(), detail};
}

// --- 5 ----------------------------------------------------------------------

Outcome executor_soundness() {
  gen::Rng rng(5005);
  int violations = 0;
  for (int i = 0; i < kExecutorCases; ++i) {
    gen::BtShape shape;
    shape.horizon = static_cast<Tick>(rng.between(0, 30));
    shape.solid = rng.chance(0.5);
    BehaviorType bt = gen::behavior(rng, "bt", shape);
    bt.frame = {rng.between(-20, 20), rng.between(-20, 20), rng.between(-20, 20)};
    violations += conforms(execute_bt(bt, shape.horizon), bt, shape.horizon).passed() ? 0 : 1;
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(kExecutorCases) + " BTs"};
}

// --- 6 ----------------------------------------------------------------------

Outcome io_round_trip() {
  gen::Rng rng(6006);
  int identical = 0;
  for (int i = 0; i < kRoundTripCases; ++i) {
    const Scenario s = gen::scenario(rng, {});
    try {
      identical += parse_scenario(serialize_scenario(s)) == s ? 1 : 0;
    } catch (const Error&) {
    }
  }
  std::size_t cases = 0;
  std::size_t matched = 0;
  for (const auto& entry : fs::directory_iterator(source_dir() / "tests" / "data" / "malformed")) {
    ++cases;
    const std::string stem = entry.path().stem().string();
    const auto a = stem.find('_');
    const std::string expected = stem.substr(a + 1, stem.find('_', a + 1) - a - 1);
    std::string kind;
    try {
      load_scenario(entry.path());
    } catch (const Error& e) {
      kind = e.kind();
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::cli_main({"validate", entry.path().string()}, out, err);
    matched += (kind == expected && code == cli::kExitUsage) ? 1 : 0;
  }
  return {identical == kRoundTripCases && cases == kMalformedCases && matched == cases,
          std::to_string(identical) + "/" + std::to_string(kRoundTripCases) + " round trips identical, " +
              std::to_string(matched) + "/" + std::to_string(cases) + " malformed inputs classified with exit 2"};
}

// --- 7 ----------------------------------------------------------------------

/// A scenario whose checks all pass: collision-free components and a sensor
/// check on a box some component actually covers.
std::optional<Scenario> passing_scenario(gen::Rng& rng) {
  gen::ScenarioShape shape;
  shape.links = false;
  shape.checks = false;
  Scenario s = gen::scenario(rng, shape);
  s.checks.push_back(CollisionCheck{});
  const auto comps = resolve_components(s);
  for (const ResolvedComponent& c : comps) {
    for (Tick t = 0; t <= s.horizon; ++t) {
      const Region sensed = sensor_coverage_at(c.behavior, t);
      if (sensed.empty()) continue;
      s.checks.push_back(SensorCoverageCheck{Region{sensed.boxes().front()}, {{t, t}}});
      t = s.horizon;
      break;
    }
    if (s.checks.size() > 1) break;
  }
  for (const CheckSpec& c : s.checks) {
    if (!run_check(s, c).passed()) return std::nullopt;
  }
  return s;
}

Outcome replacement_honesty() {
  gen::Rng rng(7007);
  int cases = 0;
  int passes = 0;
  int disagreements = 0;
  while (cases < kReplacementCases) {
    const auto maybe = passing_scenario(rng);
    if (!maybe) continue;
    const Scenario& s = *maybe;
    const Component& old = rng.pick(s.components);
    const ResolvedComponent resolved = resolve_component(s, old);
    const BehaviorType& old_type = resolved.declared ? *resolved.declared : resolved.behavior;
    const BehaviorType local = translate_bt(old_type, checked_negate(old.placement));
    gen::BtShape shape{s.horizon, 0, 16, 4, 3, true, true};
    BehaviorType replacement = gen::refinement_of(rng, local, "replacement", shape);
    replacement.sense({0, s.horizon}, gen::solid_region(rng, 1, 0, 16, 4), replacement.modes);
    ++cases;

    const Verdict v = check_replacement(s, old.id, replacement);
    passes += v.passed() ? 1 : 0;
    // Independent re-run of every piece.
    bool independent = refines(translate_bt(replacement, old.placement), old_type, s.horizon).passed();
    const Scenario swapped = substitute(s, old.id, replacement);
    for (const CheckSpec& c : swapped.checks) independent = independent && run_check(swapped, c).passed();
    disagreements += (v.passed() != independent || !independent) ? 1 : 0;
  }
  return {passes == kReplacementCases && disagreements == 0,
          std::to_string(passes) + "/" + std::to_string(cases) + " replacements pass, " +
              std::to_string(disagreements) + " disagreements with independent re-run"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 geometry oracle equivalence", geometry_oracle},
      {"2 sweep/grid engine cross-check", engine_cross_check},
      {"3 type-law suite", type_laws},
      {"4 cyber-virtual scenario end-to-end", shipped_scenario_end_to_end},
      {"5 executor soundness", executor_soundness},
      {"6 IO round trip and malformed corpus", io_round_trip},
      {"7 replacement aggregation honesty", replacement_honesty},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
