#pragma once

#include <string>

#include "playroom/chart/ast.hpp"

namespace playroom::chart {

// Parses the line-oriented statechart DSL (2-space indentation, LF lines).
// See docs/chart-format.md for the grammar. Throws ParseError with the line
// number or ValidationError for referential problems.
StatechartDoc parse_statechart(const std::string& text);

// Canonical source form; parse(pretty_print(doc)) is structurally identical
// to doc.
std::string pretty_print(const StatechartDoc& doc);

}  // namespace playroom::chart
