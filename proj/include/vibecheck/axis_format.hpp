#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "vibecheck/core.hpp"

namespace vibecheck {

/// Parses one axis line.
///
/// Accepts "Name: Low: x; High: y" and "Name: High: y Low: x", with optional
/// list markers ("-", "*", "1.", "2)"), surrounding quotes and markdown bold
/// around the name. Throws AxisParseError when either pole marker is missing or
/// the resulting vibe is malformed.
Vibe parse_axis(std::string_view line);

struct ParsedAxes {
  std::vector<Vibe> vibes;
  /// Logical lines that did not conform to the axis format.
  std::vector<std::string> rejected;
};

/// Splits a model response into logical axis lines and parses each one.
///
/// Handles a quoted list literal (["...", '...']), numbered or bulleted lists,
/// and the multiline form where "High:" and "Low:" sit on indented
/// continuation lines below the axis name.
ParsedAxes parse_axis_list(std::string_view text);

/// The logical lines of a response after joining High/Low continuation lines.
std::vector<std::string> logical_axis_lines(std::string_view text);

/// Elements of the first list literal of quoted strings in `text`. Returns
/// false when no such literal is present or it is malformed.
bool parse_quoted_list(std::string_view text, std::vector<std::string>& out);

/// Case-insensitive comparison key for axis names.
std::string axis_name_key(std::string_view name);

}  // namespace vibecheck
