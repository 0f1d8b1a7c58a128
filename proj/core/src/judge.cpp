#include "vreason/judge.hpp"

#include <optional>
#include <regex>

#include "vreason/errors.hpp"

namespace vreason {

namespace {

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

// Value of the last "<label>: <int>" match; nullopt when absent or out of
// range.
std::optional<int> labeled_score(const std::string& text, const std::regex& re) {
  std::optional<int> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
       ++it) {
    try {
      last = std::stoi((*it)[1].str());
    } catch (const std::exception&) {
      last = -1;
    }
  }
  if (last && (*last < 1 || *last > 5)) return std::nullopt;
  return last;
}

std::regex label_regex(const std::string& label) {
  // The label must start a word; bold markers and a parenthetical such as
  // "RE (relevance)" may sit between it and the colon.
  return std::regex("(?:^|[^A-Za-z])(?:" + label +
                        R"()\s*[*_]*\s*(?:\([^)\n]*\))?\s*[:=]\s*[*_]*\s*(-?\d+))",
                    kIcase);
}

std::array<int, 3> parse_three(std::string_view text, const std::array<const char*, 3>& labels,
                               const std::array<const char*, 3>& names) {
  const std::string s(text);
  std::array<int, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = labeled_score(s, label_regex(labels[i]));
    if (!v) throw ParseError(std::string("judge reply has no valid ") + names[i] + " score in [1,5]");
    out[i] = *v;
  }
  return out;
}

template <class Parse>
auto ask_judge(const std::string& prompt, const PipelineEnv& env, const RoleTarget& judge,
               Parse parse) {
  Backend& backend = env.backends.get(judge.backend_id);
  ChatRequest request;
  request.messages.push_back({MessageRole::User, prompt, {}});
  request.temperature = judge.temperature;
  request.max_output_tokens = judge.max_output_tokens;
  request.model = judge.model;
  const ChatResponse first = backend.complete(request);
  try {
    return parse(first.text);
  } catch (const ParseError&) {
  }
  request.messages.push_back({MessageRole::Assistant, first.text, {}});
  request.messages.push_back({MessageRole::User, kJudgeReask, {}});
  const ChatResponse second = backend.complete(request);
  return parse(second.text);
}

}  // namespace

CaptionScores parse_caption_scores(std::string_view text) {
  const auto v = parse_three(text,
                             {R"(detail(?:[ _-]?level)?)", R"((?:question[ _-]?)?relevance)",
                              R"((?:reasoning[ _-]?)?effective[ _-]?info(?:rmation)?(?:[ _-]?inclusion)?)"},
                             {"Detail", "Relevance", "EffectiveInfo"});
  return {v[0], v[1], v[2]};
}

ReasoningScores parse_reasoning_scores(std::string_view text) {
  const auto v = parse_three(text, {R"(RE\b)", R"(RI\b)", R"(MI\b)"}, {"RE", "RI", "MI"});
  return {v[0], v[1], v[2]};
}

CaptionScores judge_caption(const std::string& caption, const std::string& question,
                            const std::string& reference_reasoning, const PipelineEnv& env,
                            const RoleTarget& judge) {
  const std::string prompt =
      render_prompt(env.templates.get(stage::kJudgeCaption),
                    {{"caption", caption}, {"question", question}, {"reference", reference_reasoning}});
  return ask_judge(prompt, env, judge, parse_caption_scores);
}

ReasoningScores judge_reasoning(const std::string& candidate, const std::string& standard_answer,
                                const PipelineEnv& env, const RoleTarget& judge) {
  const std::string prompt =
      render_prompt(env.templates.get(stage::kJudgeReasoning),
                    {{"candidate", candidate}, {"reference", standard_answer}});
  return ask_judge(prompt, env, judge, parse_reasoning_scores);
}

std::map<bool, JudgeGroup> judge_aggregate(std::span<const JudgedItem> items) {
  if (items.empty()) throw EmptyInput("judge_aggregate needs at least one item");
  std::map<bool, std::array<long long, 3>> sums;
  std::map<bool, JudgeGroup> out;
  for (const JudgedItem& item : items) {
    auto& sum = sums[item.correct];
    for (std::size_t i = 0; i < 3; ++i) {
      if (item.scores[i] < 1 || item.scores[i] > 5)
        throw InvalidArgument("judge score " + std::to_string(item.scores[i]) + " outside [1,5]");
      sum[i] += item.scores[i];
    }
    ++out[item.correct].count;
  }
  for (auto& [flag, group] : out) {
    for (std::size_t i = 0; i < 3; ++i)
      group.means[i] = static_cast<double>(sums[flag][i]) / static_cast<double>(group.count);
  }
  return out;
}

}  // namespace vreason
