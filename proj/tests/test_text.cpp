#include <gtest/gtest.h>

#include "vibecheck/axis_format.hpp"
#include "vibecheck/errors.hpp"
#include "vibecheck/text.hpp"

using namespace vibecheck;

TEST(Text, TrimAndCollapse) {
  EXPECT_EQ(text::trim("  a b \n"), "a b");
  EXPECT_EQ(text::collapse_whitespace(" a \n\t b  "), "a b");
  EXPECT_EQ(text::to_lower("MiXeD"), "mixed");
  EXPECT_EQ(text::find_ci("Hello World", "WORLD"), 6u);
  EXPECT_TRUE(text::starts_with_ci("High: x", "high:"));
}

TEST(Text, UnescapeAndReplace) {
  EXPECT_EQ(text::unescape("a\\nb\\\\c"), "a\nb\\c");
  EXPECT_EQ(text::replace_all("a|b|c", "|", "\\|"), "a\\|b\\|c");
}

TEST(Text, ExcerptNeverSplitsUtf8) {
  const std::string s = "ab\xF0\x9F\x99\x82" "cd";
  const std::string e = text::excerpt(s, 4);
  EXPECT_EQ(e.rfind("...") + 3, e.size());
  EXPECT_EQ(e.substr(0, 2), "ab");
  EXPECT_EQ(e.find('\xF0'), std::string::npos);
  EXPECT_EQ(text::excerpt("short", 10), "short");
}

TEST(Text, ExtractTag) {
  const std::string body = "x\n<a>\none\n</a>\n<a>\ntwo\n</a>\n";
  std::string out;
  std::size_t pos = 0;
  ASSERT_TRUE(text::extract_tag(body, "a", out, pos));
  EXPECT_EQ(out, "one");
  ASSERT_TRUE(text::extract_tag(body, "a", out, pos));
  EXPECT_EQ(out, "two");
  EXPECT_FALSE(text::extract_tag(body, "a", out, pos));
}

TEST(AxisFormat, ParsesBothPoleOrders) {
  const Vibe a = parse_axis("Tone: Low: Flat and dry; High: Warm and lively");
  EXPECT_EQ(a.name, "Tone");
  EXPECT_EQ(a.low, "Flat and dry");
  EXPECT_EQ(a.high, "Warm and lively");
  const Vibe b = parse_axis("- **Tone**: High: Warm Low: Flat");
  EXPECT_EQ(b.name, "Tone");
  EXPECT_EQ(b.low, "Flat");
  EXPECT_EQ(b.high, "Warm");
  const Vibe c = parse_axis("2) \"Tone: Low: Flat; High: Warm\"");
  EXPECT_EQ(c.high, "Warm");
}

TEST(AxisFormat, MissingPoleThrows) {
  EXPECT_THROW(parse_axis("Tone: Low: Flat"), AxisParseError);
  EXPECT_THROW(parse_axis("just some prose"), AxisParseError);
}

TEST(AxisFormat, RenderRoundTrips) {
  const Vibe v = make_vibe("Detail & Elaboration", "Brief", "Thorough; with examples");
  const Vibe back = parse_axis(v.render());
  EXPECT_EQ(back.name, v.name);
  EXPECT_EQ(back.low, v.low);
  EXPECT_EQ(back.high, v.high);
}

TEST(AxisFormat, ListParsingHandlesQuotedAndMultilineForms) {
  const auto quoted = parse_axis_list(R"(["A: High: x Low: y", 'B: High: p Low: q'])");
  ASSERT_EQ(quoted.vibes.size(), 2u);
  EXPECT_EQ(quoted.vibes[1].name, "B");
  const auto multi = parse_axis_list("New Axes:\n- Depth:\n    High: Deep\n    Low: Shallow\n\n- junk line\n");
  ASSERT_EQ(multi.vibes.size(), 1u);
  EXPECT_EQ(multi.vibes[0].name, "Depth");
  EXPECT_EQ(multi.vibes[0].low, "Shallow");
  EXPECT_FALSE(multi.rejected.empty());
}

TEST(AxisFormat, NameKeyIgnoresCaseAndSpacing) {
  EXPECT_EQ(axis_name_key("Section  Headers"), axis_name_key("section headers"));
}
