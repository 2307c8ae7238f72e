#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vibecheck::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
/// Case-insensitive (ASCII) search starting at `from`; npos when absent.
std::size_t find_ci(std::string_view haystack, std::string_view needle, std::size_t from = 0);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::vector<std::string_view> split_lines(std::string_view s);
/// Collapses every whitespace run to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
/// Expands "\n", "\t" and "\\" escapes.
std::string unescape(std::string_view s);
/// Finds the next "<tag>\n...\n</tag>" block at or after `pos` and copies its
/// content to `out`. On success `pos` moves past the closing tag.
bool extract_tag(std::string_view s, std::string_view tag, std::string& out, std::size_t& pos);
/// UTF-8 safe prefix of at most `max_bytes` bytes, with "..." when cut.
std::string excerpt(std::string_view s, std::size_t max_bytes);

}  // namespace vibecheck::text
