#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

#include "vreason/pipeline.hpp"

namespace vreason {

// Caption rubric, each score in [1, 5].
struct CaptionScores {
  int detail_level = 0;
  int question_relevance = 0;
  int effective_info = 0;

  std::array<int, 3> as_array() const { return {detail_level, question_relevance, effective_info}; }
  bool operator==(const CaptionScores&) const = default;
};

// Reasoning rubric against a standard answer, each score in [1, 5]:
// relevance (RE, higher is better), redundancy (RI) and missing
// information (MI), both lower is better.
struct ReasoningScores {
  int relevance = 0;
  int redundancy = 0;
  int missing = 0;

  std::array<int, 3> as_array() const { return {relevance, redundancy, missing}; }
  bool operator==(const ReasoningScores&) const = default;
};

// Reads "Detail: n", "Relevance: n", "EffectiveInfo: n" (label spelling and
// case are tolerated, the last occurrence of each wins). Throws ParseError
// if a score is missing or outside [1, 5].
CaptionScores parse_caption_scores(std::string_view text);
// Same for "RE: n", "RI: n", "MI: n".
ReasoningScores parse_reasoning_scores(std::string_view text);

inline constexpr const char* kJudgeReask = "Respond with the three labeled integer scores only.";

// Scores a caption. The judge never sees whether the answer was correct.
// On an unparseable reply the judge is asked once more, with its previous
// reply in the conversation; a second failure throws ParseError.
CaptionScores judge_caption(const std::string& caption, const std::string& question,
                            const std::string& reference_reasoning, const PipelineEnv& env,
                            const RoleTarget& judge);

ReasoningScores judge_reasoning(const std::string& candidate, const std::string& standard_answer,
                                const PipelineEnv& env, const RoleTarget& judge);

struct JudgedItem {
  std::array<int, 3> scores{};
  bool correct = false;
};

struct JudgeGroup {
  std::size_t count = 0;
  std::array<double, 3> means{};
};

// Per-metric means keyed by the correctness flag. Throws EmptyInput for no
// items and InvalidArgument for a score outside [1, 5].
std::map<bool, JudgeGroup> judge_aggregate(std::span<const JudgedItem> items);

}  // namespace vreason
