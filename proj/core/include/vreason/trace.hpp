#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vreason/types.hpp"
#include "vreason/usage.hpp"

namespace vreason {

// What an expert contributed; this is the text that goes into Memory.
struct ExpertAnswer {
  std::string text;

  bool operator==(const ExpertAnswer&) const = default;
};

struct FinalAnswer {
  std::string reasoning;               // full model output
  std::optional<std::string> think;    // content of the <think> block, if any
  std::optional<std::string> extracted;

  bool operator==(const FinalAnswer&) const = default;
};

using ParsedOutput = std::variant<DispatchDecision, ExpertAnswer, RefereeVerdict, FinalAnswer>;

// True when the parsed alternative is the one `role` produces.
bool parsed_matches_role(AgentRole role, const ParsedOutput& parsed);

struct StepRecord {
  AgentRole role = AgentRole::Dispatcher;
  std::string stage;  // template id used for the call, e.g. "dispatcher", "vdgd_caption"
  int attempt = 1;
  int step = 1;
  std::string prompt;
  std::string raw_response;
  ParsedOutput parsed;
  UsageStats usage;
  int image_count = 0;
  bool parse_fallback = false;
  bool cached = false;

  bool operator==(const StepRecord&) const = default;
};

struct RunTrace {
  std::string question_id;
  std::string dataset;
  std::string method;
  std::vector<StepRecord> steps;
  FinalAnswer final;
  UsageStats total_usage;
  int attempts_used = 0;
  int steps_used_last_attempt = 0;
  int memory_clears = 0;
  // Filled in by the evaluation harness once the answer is scored.
  std::optional<bool> correct;

  // Recomputes total_usage from the steps.
  void recompute_usage();

  int count_role(AgentRole role) const;
  // Expert calls (vision + insight) across all attempts.
  int perception_steps() const;
  int fallback_count() const;

  bool operator==(const RunTrace&) const = default;
};

}  // namespace vreason
