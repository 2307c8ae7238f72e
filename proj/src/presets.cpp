#include "vibecheck/presets.hpp"

#include <array>
#include <string>

namespace vibecheck {

namespace {

struct Preset {
  const char* name;
  const char* low;
  const char* high;
};

constexpr std::array<Preset, 10> kPresets{{
    {"Assertiveness", "Uses tentative or uncertain language", "Uses definitive, confident statements"},
    {"Detail & Elaboration", "Gives brief or shallow responses",
     "Provides thorough, nuanced, and expansive information"},
    {"Formality", "casual, conversational, or informal language",
     "formal, sophisticated language and sentence structure"},
    {"Emotional Tone", "Remains neutral or detached",
     "Infuses responses with expressive emotion and enthusiastic or empathetic tone"},
    {"Creativity & Originality", "Sticks to standard, predictable answers",
     "Provides responses with novel ideas or imaginative scenarios"},
    {"Explicitness", "Uses vague or implicit language", "States things directly and unambiguously"},
    {"Humor and Playfulness", "Responds in a straightforward and serious manner",
     "Uses humor, playful language, or wordplay"},
    {"Engagement", "Presents information passively",
     "Actively engages the reader using rhetorical questions or interactive phrasing"},
    {"Logical Rigor", "Provides conclusions without thorough justification",
     "Constructs well-supported arguments with clear reasoning"},
    {"Conciseness", "Uses verbose language and excessive details", "Uses minimal words to convey a point clearly"},
}};

}  // namespace

std::vector<Vibe> preset_vibes() {
  std::vector<Vibe> out;
  for (std::size_t i = 0; i < kPresets.size(); ++i) {
    Vibe v = make_vibe(kPresets[i].name, kPresets[i].low, kPresets[i].high, VibeOrigin::Preset, 0);
    v.id = "preset-" + std::to_string(i);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace vibecheck
