#include "vibecheck/prompts.hpp"

#include <cctype>

#include "vibecheck/text.hpp"

namespace vibecheck::prompts {

namespace {

constexpr std::string_view kDiscoveryMarker = "major differences between these two LLM outputs";
constexpr std::string_view kIterationMarker = "expand on the set of axes";
constexpr std::string_view kReductionMarker = "Are there any axes that have similar meanings";
constexpr std::string_view kFinalReductionMarker = "summarize this list to at most";
constexpr std::string_view kDedupMarker = "Your task is to remove any redundant axes";
constexpr std::string_view kRankerMarker = "evaluate where each output falls on the following axis";
constexpr std::string_view kPreferenceMarker = "act as an impartial judge";
constexpr std::string_view kCategoryMarker = "Categorize the following user question";

std::string tagged(std::string_view tag, std::string_view body) {
  std::string out;
  out.reserve(body.size() + 2 * tag.size() + 8);
  out += '<';
  out += tag;
  out += ">\n";
  out += body;
  out += "\n</";
  out += tag;
  out += '>';
  return out;
}

std::string render_samples(std::span<const ComparisonRecord> batch) {
  std::string out;
  for (const auto& r : batch) {
    out += "<sample>\n";
    out += tagged("prompt", r.prompt) + "\n";
    out += tagged("output_a", r.output_a) + "\n";
    out += tagged("output_b", r.output_b) + "\n";
    out += "</sample>\n";
  }
  return out;
}

std::string bullet_list(std::span<const Vibe> axes, bool high_first) {
  std::string out;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (i) out += '\n';
    out += "- ";
    out += high_first ? axes[i].render_high_first() : axes[i].render();
  }
  return out;
}

constexpr std::string_view kBadGoodExamples =
    R"(Some examples of bad axes include:

- "Configuration Clarity: High: Clearly defined structure and purpose. Low: Vaguely defined, minimal purpose." -> This axis is bad because it is not clear what a clearly defined purpose means nor what a vaguely defined purpose means.
- "Language and Communication: High: Varied/precise, complex structure. Low: Straightforward, simple or general language." -> This axis is bad because it combines multiple concepts into one axis.
- "Content Quality: High: High quality, engaging, informative. Low: Low quality, unengaging, uninformative." -> This axis is bad because it is not clear what high quality means nor what low quality means.

Some examples of good axes include:

- "Complexity: High: Complex, multi-layered, intricate. Low: Simple, straightforward, easy to understand."
- "Efficiency (coding): High: Code optimized for runtime, minimal memory usage. Low: Code inefficient, high memory usage."

Some examples of axes which should be combined include:

- "Emotional Tone: High: Contains emotionally charged language. Low: Maintains a neutral tone." and "Empathy: High: Shows empathy. Low: Only factual answers without empathy." are redundant because they both measure the emotional content of the text. If two similar axes are found, keep the one that is more informative or more specific.)";

}  // namespace

const char* to_string(Kind kind) noexcept {
  switch (kind) {
    case Kind::Discovery: return "discovery";
    case Kind::Iteration: return "iteration";
    case Kind::Reduction: return "reduction";
    case Kind::FinalReduction: return "final_reduction";
    case Kind::Dedup: return "dedup";
    case Kind::Ranker: return "ranker";
    case Kind::Preference: return "preference";
    case Kind::Category: return "category";
    case Kind::Unknown: return "unknown";
  }
  return "unknown";
}

Kind detect_kind(std::string_view user) {
  if (user.find(kRankerMarker) != std::string_view::npos) return Kind::Ranker;
  if (user.find(kPreferenceMarker) != std::string_view::npos) return Kind::Preference;
  if (user.find(kIterationMarker) != std::string_view::npos) return Kind::Iteration;
  if (user.find(kDiscoveryMarker) != std::string_view::npos) return Kind::Discovery;
  if (user.find(kFinalReductionMarker) != std::string_view::npos) return Kind::FinalReduction;
  if (user.find(kReductionMarker) != std::string_view::npos) return Kind::Reduction;
  if (user.find(kDedupMarker) != std::string_view::npos) return Kind::Dedup;
  if (user.find(kCategoryMarker) != std::string_view::npos) return Kind::Category;
  return Kind::Unknown;
}

const std::string_view kProposerSystem =
    "You are a machine learning researcher analyzing outputs from two LLMs on the same input. Identify "
    "differences along specific, mutually exclusive, and clearly defined axes that are easily interpretable by "
    "humans. For each axis, provide a concise description of what it means for an output to be \"Low\" and "
    "\"High\" on this axis.";

const std::string_view kReducerSystem =
    "You are a careful editor of evaluation rubrics. Follow the requested output format exactly.";

const std::string_view kRankerSystem =
    "You are an impartial evaluator. End your response with a final line of the form \"Model: A\" or "
    "\"Model: B\", or with \"N/A\" when the axis does not apply or the outputs are roughly equal on it.";

const std::string_view kPreferenceSystem =
    "You are an impartial judge of response quality. Follow the requested output format exactly.";

const std::string_view kCategorySystem = "You classify user questions. Follow the requested output format exactly.";

std::string discovery(std::span<const ComparisonRecord> batch) {
  std::string out =
      "The following are the results of asking a set of language models to generate an answer for the same "
      "questions. Each sample holds the prompt followed by the outputs of model A and model B:\n\n";
  out += render_samples(batch);
  out += "\n";
  out +=
      "I am a machine learning researcher trying to figure out the major differences between these two LLM "
      "outputs so I can better compare the behavior of these models. Are there any variations you notice in the "
      "outputs?\n\n"
      "Please output a list differences between these sets of outputs with relation to specific axes of "
      "variation. Try to give axes that a human could easily interpret and they could understand what it means to "
      "be higher or lower on that specific axis. Please ensure that the concepts used to explain what is high and "
      "low on the axis are distinct and mutually exclusive such that given any tuple of text outputs, a human "
      "could easily and reliably determine which model is higher or lower on that axis.\n\n"
      "The format should be: {axis}: Low: {low description}; High: {high description}\n"
      "Write one axis per line.";
  return out;
}

std::string iteration(std::span<const ComparisonRecord> batch, std::span<const Vibe> existing) {
  std::string out =
      "Given a new set of responses, your task is to expand on the set of axes which have been previously "
      "identified by finding other clear differences between the responses that are not captured by the existing "
      "axes. The expanded axes should be any differences between responses that are not clearly captured by the "
      "existing axes. Be as exhaustive as possible in listing differences on as many different axes as you can "
      "think of, and be specific about what constitutes high and low on each axis.\n\n"
      "Your axis should be interpretable: a human should easily and reliably determine which response is higher, "
      "lower, or even on this axis when given a new set of responses. Please do not make your axes too broad and "
      "list as many axes as you can think of that are not covered by the existing axes. Most of these new axes "
      "should be either completely different from the existing axes or should highlight a more finegrained "
      "difference which an existing axis might broadly cover. For instance, if an existing axis is \"Enthusiasm: "
      "High: enthusiastic, Low: unenthusiastic\", a new axis might be \"Use of Exclamation Points\", or if an "
      "existing axis is \"Cultural Context: High: culturally relevant, Low: culturally irrelevant\", a new axis "
      "might be \"Use of Slang\".\n\n";
  out += tagged("existing_axes", bullet_list(existing, true));
  out += "\n\nHere are the responses. Each sample holds the prompt followed by the outputs of model A and model B:\n\n";
  out += render_samples(batch);
  out +=
      "\nPlease think through the axes carefully and make sure they are clear, concise, and do not overlap with "
      "each other or the existing axes. Do not include any of the existing axes in your response. Your output "
      "should be in this format:\n\n"
      "New Axes:\n"
      "- {axis 1}:\n"
      "    High: {description of high}\n"
      "    Low: {description of low}\n\n"
      "- {axis 2}:\n"
      "    High: {description of high}\n"
      "    Low: {description of low}\n\n"
      "Do not include any other information in your response.";
  return out;
}

std::string reduction(std::span<const Vibe> axes) {
  std::string out =
      "Below is a list of axes with a description of what makes a piece of text low or high on this axis. Are "
      "there any axes that have similar meanings based off their low and high descriptions? Are there any sets of "
      "axes that would convey the same information to a user (e.g. level of detail)? Could any of the low and high "
      "descriptions be simplified to make them easier to understand?\n\n"
      "Please remove any axes with roughly the same meaning and simplify the descriptions of what makes a piece of "
      "text low or high on this axis. Please ensure that the descriptions of what makes a piece of text low or "
      "high on this axis are distinct, useful, and mutually exclusive. Given any piece of text, a human should be "
      "able to easily and reliably determine if this text falls high or low on each axis.\n\n"
      "Here is the list of axes:\n";
  out += tagged("axes", bullet_list(axes, true));
  out +=
      "\n\nPlease return the simplified list of axes and the descriptions of what makes a piece of text low or "
      "high on this axis. These axes should contain only one concept and should be human interpretable.\n";
  out += kBadGoodExamples;
  out +=
      "\n\nPlease maintain the format of the original axes and return a list like [\"{axis name}: High: {high "
      "description} Low: {low description}\", ...]. I should be able to parse this output into a string using "
      "ast.literal_eval. If the original list does not contain any redundant axes, please return the original "
      "list.";
  return out;
}

std::string final_reduction(std::span<const Vibe> axes, std::size_t cap) {
  const std::string n = std::to_string(cap);
  std::string out =
      "Below is a list of axes with a description of what makes a piece of text low or high on this axis. I would "
      "like to summarize this list to at most " +
      n + " representative axes.\n\nHere is the list of axes:\n";
  out += tagged("axes", bullet_list(axes, true));
  out += "\n\nThese axes should contain only one concept and should be human interpretable. ";
  out += kBadGoodExamples;
  out += "\n\nPlease return the simplified list of <=" + n +
         " axes with any redundant axes removed and the descriptions of what makes a piece of text low or high on "
         "this axis simplified. Are there any axes which convey roughly the same information? Are there any axes "
         "where almost all samples which score highly on one axis would also score highly on the other?\n\n"
         "Please maintain the format of the original axes and return a numbered list. Each element should be "
         "structured as follows:\n\"{axis name}: High: {high description} Low: {low description}\"";
  return out;
}

std::string dedup(std::span<const Vibe> existing, std::span<const Vibe> fresh) {
  std::string out =
      "Here is a list of axes on which two strings may vary. Each axis has a description of what makes a string "
      "high or low on that axis.\n\n";
  out += tagged("existing_axes", bullet_list(existing, true));
  out += "\n\n";
  out += tagged("new_axes", bullet_list(fresh, true));
  out +=
      "\n\nIt is likely that several of these axes measure similar things. Your task is to remove any redundant "
      "axes. Think about if a user would gain any new information from seeing both axes. For example, \"Emotional "
      "Tone: High: Contains emotionally charged language. Low: Maintains a neutral tone.\" and \"Empathy: High: "
      "Shows empathy. Low: Only factual answers without empathy.\" are redundant because they both measure the "
      "emotional content of the text. If two similar axes are found, keep the one that is more informative.\n\n"
      "Output the reduced list of axes, separated by a newline. All of the axes should maintain the same format "
      "they have in the list of {axis}: High: {high} Low: {low}";
  return out;
}

std::string ranker(const Vibe& vibe, std::string_view prompt, std::string_view first, std::string_view second) {
  std::string out =
      "I want to compare the outputs of two language models (A and B) for the same prompt. I would like you to "
      "evaluate where each output falls on the following axis:\n";
  out += tagged("axis", vibe.render());
  out +=
      "\n\nIf you had to choose which output is higher on the axis, which would you choose? Here is the prompt and "
      "the outputs of A and B respectively:\n\n";
  out += tagged("prompt", prompt) + "\n";
  out += tagged("output_a", first) + "\n";
  out += tagged("output_b", second) + "\n\n";
  out +=
      "Please respond with which model you think is higher on the axis and explain your reasoning. If this axis "
      "does not apply to these examples or these outputs are roughly equal on this axis, return \"N/A\".";
  return out;
}

std::string preference(std::string_view prompt, std::string_view first, std::string_view second) {
  std::string out =
      "Please act as an impartial judge and evaluate the quality of the responses provided by two AI assistants "
      "(A and B) to the user question displayed below. You should choose the assistant that follows the user's "
      "instructions and answers the user's question better. Your evaluation should consider factors such as the "
      "helpfulness, relevance, accuracy, depth, creativity, and level of detail of their responses. Begin your "
      "evaluation by comparing the two responses and provide a short explanation. Avoid any position biases and "
      "ensure that the order in which the responses were presented does not influence your decision. Do not allow "
      "the length of the responses to influence your evaluation. Do not favor certain names of the assistants. Be "
      "as objective as possible.\n\nHere is the prompt and the outputs of A and B respectively:\n\n";
  out += tagged("prompt", prompt) + "\n";
  out += tagged("output_a", first) + "\n";
  out += tagged("output_b", second) + "\n\n";
  out +=
      "Please respond with the model which contains a higher quality response. Based on your analysis, please "
      "explain your reasoning before assigning a score. Use the following format for your response:\n\n"
      "Analysis: {reasoning}\n\nModel: {A, B, tie}";
  return out;
}

std::string category(std::string_view prompt) {
  std::string out =
      "Categorize the following user question as a STEM question (science, technology, engineering, math, or "
      "coding), a Writing/Chatting prompt (creative writing, humanities questions, or general chatting), or "
      "neither.\n\n";
  out += tagged("question", prompt);
  out += "\n\nRespond with exactly one line of the form \"Category: STEM\", \"Category: Writing\", or "
         "\"Category: Other\".";
  return out;
}

const std::string_view kAxisFormatRepair =
    "Your previous response did not contain any axis in the required format. Please answer again and write each "
    "axis as: {axis}: Low: {low description}; High: {high description}";

const std::string_view kReduceFormatRepair =
    "Your previous response could not be parsed. Please maintain the format of the original axes and return a list "
    "like [\"{axis name}: High: {high description} Low: {low description}\", ...].";

const std::string_view kVerdictRepair =
    "Your previous response did not name a model. Please answer again and end with \"Model: A\", \"Model: B\", or "
    "\"N/A\".";

std::string repair(std::string_view original_user, std::string_view previous_response, std::string_view instruction) {
  std::string out(original_user);
  out += "\n\n";
  out += tagged("previous_response", previous_response);
  out += "\n\n";
  out += instruction;
  return out;
}

// --- reading requests back ---------------------------------------------------

std::vector<Sample> samples(std::string_view user) {
  std::vector<Sample> out;
  std::size_t pos = 0;
  std::string block;
  // The previous-response block of a repair request is never scanned.
  std::size_t limit = user.find("<previous_response>\n");
  std::string_view scoped = limit == std::string_view::npos ? user : user.substr(0, limit);
  while (text::extract_tag(scoped, "sample", block, pos)) {
    Sample s;
    std::size_t p = 0;
    if (text::extract_tag(block, "prompt", s.prompt, p) && text::extract_tag(block, "output_a", s.first, p) &&
        text::extract_tag(block, "output_b", s.second, p))
      out.push_back(std::move(s));
  }
  return out;
}

std::optional<Sample> pair(std::string_view user) {
  Sample s;
  std::size_t p = 0;
  if (text::extract_tag(user, "prompt", s.prompt, p) && text::extract_tag(user, "output_a", s.first, p) &&
      text::extract_tag(user, "output_b", s.second, p))
    return s;
  return std::nullopt;
}

std::optional<std::string> ranker_axis(std::string_view user) {
  std::string axis;
  std::size_t p = 0;
  if (text::extract_tag(user, "axis", axis, p)) return axis;
  return std::nullopt;
}

std::vector<std::string> axis_block(std::string_view user, std::string_view tag) {
  std::string body;
  std::size_t p = 0;
  std::vector<std::string> out;
  if (!text::extract_tag(user, tag, body, p)) return out;
  for (std::string_view line : text::split_lines(body)) {
    line = text::trim(line);
    if (line.substr(0, 2) == "- ") line.remove_prefix(2);
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

std::optional<std::size_t> final_cap(std::string_view user) {
  std::size_t p = user.find(kFinalReductionMarker);
  if (p == std::string_view::npos) return std::nullopt;
  p += kFinalReductionMarker.size();
  while (p < user.size() && user[p] == ' ') ++p;
  std::size_t value = 0;
  bool any = false;
  while (p < user.size() && std::isdigit(static_cast<unsigned char>(user[p]))) {
    value = value * 10 + static_cast<std::size_t>(user[p] - '0');
    any = true;
    ++p;
  }
  if (!any) return std::nullopt;
  return value;
}

std::optional<std::string> category_question(std::string_view user) {
  std::string q;
  std::size_t p = 0;
  if (text::extract_tag(user, "question", q, p)) return q;
  return std::nullopt;
}

}  // namespace vibecheck::prompts
