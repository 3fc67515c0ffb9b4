#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cvlab/verify.hpp"

namespace cvlab {

inline constexpr const char* kToolVersion = "0.1.0";

struct ReportMeta {
  std::string scenario;
  std::uint64_t seed = 0;
  Tick horizon = 0;
  std::uint32_t tick_ms = 100;
  Coord cell_size = 1;
  std::string tool_version = kToolVersion;
};

struct Report {
  ReportMeta meta;
  std::vector<CheckOutcome> checks;

  bool passed() const noexcept;
};

Report make_report(const Scenario& scenario, std::vector<CheckOutcome> checks);

/// Pretty-printed JSON with stable key order.
std::string to_json(const Report& report);
/// One line per check plus a summary line.
std::string to_text(const Report& report);

void write_report(const Report& report, std::ostream& out, bool json);

}  // namespace cvlab
