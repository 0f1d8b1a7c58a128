#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vreason/trace.hpp"
#include "vreason/types.hpp"

namespace vreason {

inline constexpr double kDefaultNumericEpsilon = 1e-6;

// Canonical decimal form: commas and a leading '+' removed, redundant
// zeros dropped ("1,280.50" -> "1280.5", "-0.0" -> "0"). nullopt if `s`
// holds no number.
std::optional<std::string> canonical_number(std::string_view s);

// Lowercase, whitespace collapsed, trailing sentence punctuation removed.
std::string normalize_free_text(std::string_view s);

// Normalizes a short answer string (an "Answer:" line, a ground truth) to
// the canonical form for `kind`: a choice label, "yes"/"no", a canonical
// number, or normalized free text.
std::optional<std::string> normalize_answer(std::string_view candidate, AnswerKind kind,
                                            const std::vector<Choice>& choices);

// Rule cascade over a full model response:
//   1. the last "Answer:" line, normalized for `kind`;
//   2. multiple choice: the last standalone label token, e.g. "(B)" or "B.";
//   3. yes/no: the last yes/no word;
//   4. numeric: the last number, canonicalized.
// Case-insensitive throughout. nullopt when nothing matches. For multiple
// choice the result is always one of the choice labels.
std::optional<std::string> extract_answer(std::string_view raw, AnswerKind kind,
                                          const std::vector<Choice>& choices);

// Scoring comparison shared by the scorer and the distillation filter.
// Numeric answers match on canonical equality or, failing that, within a
// relative epsilon.
bool answers_match(const std::optional<std::string>& extracted, std::string_view truth,
                   AnswerKind kind, const std::vector<Choice>& choices,
                   double relative_epsilon = kDefaultNumericEpsilon);

// Splits the think block off and runs extract_answer on the remainder.
FinalAnswer make_final_answer(std::string raw, const QuestionInstance& question);

}  // namespace vreason
