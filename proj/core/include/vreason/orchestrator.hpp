#pragma once

#include <span>

#include "vreason/pipeline.hpp"
#include "vreason/trace.hpp"

namespace vreason {

// Method name recorded in RunTrace::method: "proreason", or
// "proreason+merge_vi" / "proreason+merge_perception" / "proreason+merge_all".
std::string proreason_method_name(MergeConfig merge);

// Runs the decoupled perception loop and the Summarizer for one question.
//
// Per attempt, up to policy.max_steps_per_attempt steps of
// Dispatcher -> chosen expert -> Memory append -> Referee, leaving the loop
// on the first SOLVABLE. An attempt that ends UNSOLVABLE clears Memory and
// starts over until policy.max_attempts is reached; after that the
// Summarizer works from the last attempt's Memory. Only the Vision Expert
// (or a merged agent that subsumes it) receives images.
//
// The merge variants keep the rest of the structure:
//   VisionInsightMerged  one image-seeing expert inside the loop;
//   PerceptionMerged     one image-bearing call gathers information, then
//                        the Summarizer;
//   AllMerged            a single image-bearing call answers directly.
//
// Backend failures surface as BackendError carrying role/attempt/step.
// Unparseable dispatcher or referee output is recorded as a fallback and
// the run continues.
RunTrace run_proreason(const QuestionInstance& question, const PipelineEnv& env,
                       const RoleBinding& bindings, const LoopPolicy& policy,
                       MergeConfig merge = MergeConfig::None);

struct ExpertFrequencies {
  double vision_per_question = 0.0;
  double insight_per_question = 0.0;

  bool operator==(const ExpertFrequencies&) const = default;
};

// Mean expert invocations per question. Throws EmptyInput.
ExpertFrequencies expert_frequencies(std::span<const RunTrace> traces);

// Mean perception-loop steps (expert calls, all attempts) per question.
// Throws EmptyInput.
double iteration_stats(std::span<const RunTrace> traces);

}  // namespace vreason
