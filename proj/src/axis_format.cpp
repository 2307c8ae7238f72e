#include "vibecheck/axis_format.hpp"

#include <algorithm>
#include <cctype>

#include "vibecheck/errors.hpp"
#include "vibecheck/text.hpp"

namespace vibecheck {

namespace {

using text::trim;

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string_view strip_quotes(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s.remove_prefix(1);
    s.remove_suffix(1);
  }
  return trim(s);
}

std::string_view strip_list_marker(std::string_view s) {
  s = trim(s);
  for (std::string_view bullet : {"- ", "* ", "\xE2\x80\xA2 "}) {
    if (s.substr(0, bullet.size()) == bullet) return trim(s.substr(bullet.size()));
  }
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') return trim(s.substr(i + 2));
  return s;
}

// First occurrence of `marker` that does not continue a word ("Below:" is not
// a "low:" marker).
std::size_t find_marker(std::string_view s, std::string_view marker) {
  std::size_t pos = 0;
  while ((pos = text::find_ci(s, marker, pos)) != std::string_view::npos) {
    if (pos == 0 || !is_alnum(s[pos - 1])) return pos;
    ++pos;
  }
  return std::string_view::npos;
}

std::string clean_name(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.back() == ':' || s.back() == '-' || s.back() == ',' || s.back() == '*' ||
                        std::isspace(static_cast<unsigned char>(s.back()))))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == '*' || std::isspace(static_cast<unsigned char>(s.front())))) s.remove_prefix(1);
  return std::string(strip_quotes(s));
}

std::string clean_description(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '*' || std::isspace(static_cast<unsigned char>(s.front())))) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ';' || s.back() == ',' || std::isspace(static_cast<unsigned char>(s.back()))))
    s.remove_suffix(1);
  // Bold markers dangling before the next pole ("... **Low:**").
  while (s.size() >= 2 && s.substr(s.size() - 2) == "**") s = trim(s.substr(0, s.size() - 2));
  return text::collapse_whitespace(s);
}

}  // namespace

Vibe parse_axis(std::string_view line) {
  std::string_view s = trim(line);
  while (!s.empty() && s.back() == ',') s = trim(s.substr(0, s.size() - 1));
  s = strip_quotes(strip_list_marker(strip_quotes(s)));

  constexpr std::string_view kLow = "low:";
  constexpr std::string_view kHigh = "high:";
  const std::size_t low = find_marker(s, kLow);
  const std::size_t high = find_marker(s, kHigh);
  if (low == std::string_view::npos || high == std::string_view::npos)
    throw AxisParseError("axis line lacks Low:/High: markers: " + std::string(s));

  const bool low_first = low < high;
  const std::size_t first = low_first ? low : high;
  const std::size_t second = low_first ? high : low;
  const std::size_t first_len = low_first ? kLow.size() : kHigh.size();
  const std::size_t second_len = low_first ? kHigh.size() : kLow.size();

  std::string name = clean_name(s.substr(0, first));
  std::string first_desc = clean_description(s.substr(first + first_len, second - first - first_len));
  std::string second_desc = clean_description(s.substr(second + second_len));

  if (low_first) return make_vibe(std::move(name), std::move(first_desc), std::move(second_desc));
  return make_vibe(std::move(name), std::move(second_desc), std::move(first_desc));
}

std::vector<std::string> logical_axis_lines(std::string_view body) {
  std::vector<std::string> out;
  std::string current;
  for (std::string_view raw : text::split_lines(body)) {
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    std::string_view bare = strip_list_marker(line);
    bool continuation = text::starts_with_ci(bare, "high:") || text::starts_with_ci(bare, "low:");
    if (continuation && !current.empty()) {
      current += ' ';
      current += bare;
      continue;
    }
    if (!current.empty()) out.push_back(std::move(current));
    current.assign(line);
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

bool parse_quoted_list(std::string_view s, std::vector<std::string>& out) {
  std::size_t open = 0;
  while ((open = s.find('[', open)) != std::string_view::npos) {
    std::vector<std::string> items;
    std::size_t i = open + 1;
    bool ok = false;
    auto skip_ws = [&] {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    };
    while (true) {
      skip_ws();
      if (i >= s.size()) break;
      if (s[i] == ']') {
        ok = !items.empty();
        break;
      }
      char quote = s[i];
      if (quote != '"' && quote != '\'') break;
      ++i;
      std::string item;
      bool closed = false;
      while (i < s.size()) {
        char c = s[i++];
        if (c == '\\' && i < s.size()) {
          char n = s[i++];
          item.push_back(n == 'n' ? '\n' : n == 't' ? '\t' : n);
        } else if (c == quote) {
          closed = true;
          break;
        } else {
          item.push_back(c);
        }
      }
      if (!closed) break;
      items.push_back(std::move(item));
      skip_ws();
      if (i < s.size() && s[i] == ',') ++i;
    }
    if (ok) {
      out = std::move(items);
      return true;
    }
    ++open;
  }
  return false;
}

ParsedAxes parse_axis_list(std::string_view body) {
  ParsedAxes result;
  std::vector<std::string> lines;
  if (!parse_quoted_list(body, lines)) lines = logical_axis_lines(body);
  for (auto& line : lines) {
    try {
      result.vibes.push_back(parse_axis(line));
    } catch (const AxisParseError&) {
      result.rejected.push_back(std::move(line));
    }
  }
  return result;
}

std::string axis_name_key(std::string_view name) {
  std::string key = text::to_lower(text::collapse_whitespace(name));
  while (!key.empty() && (key.back() == '.' || key.back() == ':')) key.pop_back();
  return key;
}

}  // namespace vibecheck
