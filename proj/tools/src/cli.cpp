#include "cvlab_cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "cvlab/error.hpp"
#include "cvlab/report.hpp"
#include "cvlab/scenario_io.hpp"
#include "cvlab/scene_trace.hpp"
#include "cvlab/simulate.hpp"
#include "cvlab/verify.hpp"

namespace cvlab::cli {

namespace {

struct Overrides {
  std::optional<Tick> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint32_t> tick_ms;
  std::optional<Coord> cell_size;
};

struct Options {
  std::string scenario;
  Overrides overrides;
  bool cross_check = false;
  bool json = false;
  std::string scene_out;
  std::string report_out;
  std::string messages_out;
};

void add_overrides(CLI::App* cmd, Options& o) {
  cmd->add_option("--horizon", o.overrides.horizon, "Last simulated tick (overrides the file)");
  cmd->add_option("--seed", o.overrides.seed, "Scenario seed (overrides the file)");
  cmd->add_option("--tick-ms", o.overrides.tick_ms, "Tick length in ms (overrides the file)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cell-size", o.overrides.cell_size, "Grid cell edge in mm (overrides the file)")
      ->check(CLI::PositiveNumber);
}

Scenario load(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.overrides.horizon) {
    s.horizon = *o.overrides.horizon;
    for (BehaviorType& bt : s.behaviors) bt.horizon = std::max(bt.horizon, s.horizon);
  }
  if (o.overrides.seed) s.seed = *o.overrides.seed;
  if (o.overrides.tick_ms) s.tick_ms = *o.overrides.tick_ms;
  if (o.overrides.cell_size) s.cell_size = *o.overrides.cell_size;
  s.validate();
  return s;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open output file", path);
  return f;
}

int emit_report(const Scenario& s, const Options& o, std::ostream& out) {
  CheckOptions options;
  options.cross_check = o.cross_check;
  options.grid.cell_size = s.cell_size;
  const Report report = make_report(s, run_checks(s, options));
  if (o.report_out.empty()) {
    write_report(report, out, o.json);
  } else {
    std::ofstream f = open_output(o.report_out);
    write_report(report, f, true);
    write_report(report, out, false);
  }
  return report.passed() ? kExitPass : kExitFail;
}

void emit_simulation(const Scenario& s, const Options& o, std::ostream& out, bool scene_to_stdout) {
  const SimulationResult result = run(s, s.horizon, s.seed);
  if (!o.scene_out.empty()) {
    std::ofstream f = open_output(o.scene_out);
    export_scene_trace(result, f);
  } else if (scene_to_stdout) {
    export_scene_trace(result, out);
  }
  if (!o.messages_out.empty()) {
    std::ofstream f = open_output(o.messages_out);
    export_message_log(result, f);
  }
}

int do_validate(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  out << "ok: scenario " << s.name << ", " << resolve_components(s).size() << " components, " << s.links.size()
      << " links, " << s.checks.size() << " checks\n";
  return kExitPass;
}

int do_replicate(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  for (const ResolvedComponent& c : resolve_components(s)) {
    nlohmann::ordered_json line;
    line["id"] = c.id;
    line["site"] = c.site;
    line["kind"] = to_string(c.kind);
    line["type"] = c.type_name;
    line["replica_of"] = c.replica_of ? nlohmann::ordered_json(*c.replica_of) : nlohmann::ordered_json(nullptr);
    out << line.dump() << '\n';
  }
  return kExitPass;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cyber-virtual workcell modeling, simulation and verification", "cvlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);
  Options o;

  CLI::App* run_cmd = app.add_subcommand("run", "Simulate, run all checks and write the report");
  CLI::App* check_cmd = app.add_subcommand("check", "Run the scenario's checks without simulating");
  CLI::App* replicate_cmd = app.add_subcommand("replicate", "Expand replication directives and list components");
  CLI::App* export_cmd = app.add_subcommand("export", "Simulate and write the scene trace");
  CLI::App* validate_cmd = app.add_subcommand("validate", "Parse and validate a scenario file");

  for (CLI::App* cmd : {run_cmd, check_cmd, replicate_cmd, export_cmd, validate_cmd}) {
    cmd->add_option("scenario", o.scenario, "Scenario file")->required();
    add_overrides(cmd, o);
  }
  for (CLI::App* cmd : {run_cmd, check_cmd}) {
    cmd->add_flag("--cross-check", o.cross_check, "Also run the grid engine on collision checks");
    cmd->add_option("--report-out", o.report_out, "Write the JSON report to this file");
    cmd->add_flag("--json", o.json, "Print the report as JSON");
  }
  for (CLI::App* cmd : {run_cmd, export_cmd}) {
    cmd->add_option("--scene-out", o.scene_out, "Write the scene trace (JSON lines) to this file");
    cmd->add_option("--messages-out", o.messages_out, "Write the message log (JSON lines) to this file");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    CLI::App* failing = &app;
    for (CLI::App* sub : app.get_subcommands()) failing = sub;
    err << failing->help();
    return kExitUsage;
  }

  try {
    if (validate_cmd->parsed()) return do_validate(o, out);
    if (replicate_cmd->parsed()) return do_replicate(o, out);
    const Scenario s = load(o);
    if (check_cmd->parsed()) return emit_report(s, o, out);
    if (export_cmd->parsed()) {
      emit_simulation(s, o, out, true);
      return kExitPass;
    }
    emit_simulation(s, o, out, false);
    return emit_report(s, o, out);
  } catch (const Error& e) {
    err << "error [" << e.kind() << "]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace cvlab::cli
