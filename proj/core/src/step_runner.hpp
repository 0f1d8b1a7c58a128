#pragma once

#include <string>
#include <vector>

#include "vreason/pipeline.hpp"
#include "vreason/trace.hpp"

namespace vreason::detail {

struct CallSpec {
  AgentRole role;
  std::string stage;  // template id
  int attempt = 1;
  int step = 1;
  Bindings bindings;
  std::vector<ImageRef> images;
};

struct CallResult {
  std::string prompt;
  std::string text;
  UsageStats usage;
};

// Renders the stage template, sends it to the role's backend and returns
// the reply. Any failure, including a blank reply, becomes a BackendError
// tagged with the role and loop position.
CallResult invoke(const PipelineEnv& env, const RoleTarget& target, const CallSpec& spec);

StepRecord make_step(const CallSpec& spec, CallResult result, ParsedOutput parsed,
                     bool fallback = false);

// {question} plus {choices} when `with_choices` is set ("None" if the
// question has no options).
Bindings question_bindings(const QuestionInstance& q, bool with_choices);

}  // namespace vreason::detail
