#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "vreason/types.hpp"

namespace vreason {

// A parse result plus whether a tolerant fallback rule produced it.
template <class T>
struct Parsed {
  T value;
  bool fallback = false;
};

// Expects "CHOICE: VISION|INSIGHT" then "QUERY: <text>" (case-insensitive,
// whitespace and light markdown tolerated). Without exactly one CHOICE the
// result is Vision with the query text (or the whole response) and the
// fallback flag set. Throws EmptyResponse on blank input.
Parsed<DispatchDecision> parse_dispatch(std::string_view raw);

// Canonical two-line form that parse_dispatch reads back exactly.
std::string format_dispatch(const DispatchDecision& decision);

// UNSOLVABLE wins over SOLVABLE (it contains it). Neither token present
// means Unsolvable with the fallback flag. Throws EmptyResponse on blank
// input.
Parsed<RefereeVerdict> parse_verdict(std::string_view raw);

struct ThinkSplit {
  std::optional<std::string> think;
  std::string rest;
};

// Splits off the first <think>...</think> block. An unclosed block leaves
// the text unchanged.
ThinkSplit extract_think(std::string_view raw);

// The answer block of a reasoning response: text after the last line that
// starts with "Answer:", or the whole response (trimmed) if there is none.
std::string extract_answer_block(std::string_view raw);

// One reason step of the ReAct baseline.
struct ReactStep {
  enum class Kind { Act, Final };
  Kind kind = Kind::Act;
  std::string text;
  bool fallback = false;
};

// The last "ACT:" or "FINAL:" marker decides; with neither the whole
// response becomes an observation request and the fallback flag is set.
ReactStep parse_react(std::string_view raw);

}  // namespace vreason
