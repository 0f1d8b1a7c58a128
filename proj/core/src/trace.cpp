#include "vreason/trace.hpp"

#include <algorithm>

namespace vreason {

bool parsed_matches_role(AgentRole role, const ParsedOutput& parsed) {
  switch (role) {
    case AgentRole::Dispatcher: return std::holds_alternative<DispatchDecision>(parsed);
    case AgentRole::VisionExpert:
    case AgentRole::InsightExpert: return std::holds_alternative<ExpertAnswer>(parsed);
    case AgentRole::Referee: return std::holds_alternative<RefereeVerdict>(parsed);
    case AgentRole::Summarizer: return std::holds_alternative<FinalAnswer>(parsed);
  }
  return false;
}

void RunTrace::recompute_usage() {
  UsageStats total;
  for (const StepRecord& s : steps) total += s.usage;
  total_usage = total;
}

int RunTrace::count_role(AgentRole role) const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [role](const StepRecord& s) { return s.role == role; }));
}

int RunTrace::perception_steps() const {
  return count_role(AgentRole::VisionExpert) + count_role(AgentRole::InsightExpert);
}

int RunTrace::fallback_count() const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [](const StepRecord& s) { return s.parse_fallback; }));
}

}  // namespace vreason
