#pragma once

// Scenario files are YAML documents. Boxes are written as flat
// [x0, y0, z0, x1, y1, z1] lists in integer millimeters, tick intervals as
// [first, last]. See README.md for the full schema.

#include <filesystem>
#include <string>
#include <string_view>

#include "cvlab/scenario.hpp"

namespace cvlab {

/// Parses and validates a scenario. Throws SyntaxError (malformed YAML, wrong
/// types, unknown or missing keys), UnresolvedReference or InvariantViolation;
/// the error location gives "line L, column C" and the field path.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a file; an unreadable file is reported as SyntaxError.
Scenario load_scenario(const std::filesystem::path& path);

/// Writes every field explicitly; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace cvlab
