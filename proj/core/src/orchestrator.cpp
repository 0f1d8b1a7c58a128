#include "vreason/orchestrator.hpp"

#include "step_runner.hpp"
#include "text_util.hpp"
#include "vreason/answer.hpp"
#include "vreason/errors.hpp"
#include "vreason/memory.hpp"
#include "vreason/parsers.hpp"

namespace vreason {

namespace {

using detail::CallSpec;
using detail::invoke;
using detail::make_step;

Bindings loop_bindings(const QuestionInstance& q, const Memory& memory) {
  // Perception agents see the question but not the options.
  Bindings b = detail::question_bindings(q, false);
  b["memory"] = memory_render(memory);
  return b;
}

class ProReasonRun {
 public:
  ProReasonRun(const QuestionInstance& q, const PipelineEnv& env, const RoleBinding& bindings,
               const LoopPolicy& policy, MergeConfig merge)
      : q_(q), env_(env), bindings_(bindings), policy_(policy), merge_(merge) {
    trace_.question_id = q.id;
    trace_.dataset = q.dataset;
    trace_.method = proreason_method_name(merge);
  }

  RunTrace run() && {
    switch (merge_) {
      case MergeConfig::None:
      case MergeConfig::VisionInsightMerged:
        perception_loop();
        summarize();
        break;
      case MergeConfig::PerceptionMerged:
        merged_perception();
        summarize();
        break;
      case MergeConfig::AllMerged:
        merged_all();
        break;
    }
    trace_.memory_clears = trace_.attempts_used > 0 ? trace_.attempts_used - 1 : 0;
    trace_.recompute_usage();
    return std::move(trace_);
  }

 private:
  void perception_loop() {
    for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
      memory_ = memory_clear(memory_);
      trace_.attempts_used = attempt;
      for (int step = 1; step <= policy_.max_steps_per_attempt; ++step) {
        trace_.steps_used_last_attempt = step;
        const DispatchDecision decision = dispatch(attempt, step);
        consult_expert(decision, attempt, step);
        if (referee(attempt, step) == RefereeVerdict::Solvable) return;
      }
    }
  }

  DispatchDecision dispatch(int attempt, int step) {
    CallSpec spec{AgentRole::Dispatcher, stage::kDispatcher, attempt, step,
                  loop_bindings(q_, memory_), {}};
    auto result = invoke(env_, bindings_.at(AgentRole::Dispatcher), spec);
    const Parsed<DispatchDecision> parsed = parse_dispatch(result.text);
    trace_.steps.push_back(make_step(spec, std::move(result), parsed.value, parsed.fallback));
    return parsed.value;
  }

  void consult_expert(const DispatchDecision& decision, int attempt, int step) {
    Bindings b = loop_bindings(q_, memory_);
    b["query"] = decision.query;

    CallSpec spec{AgentRole::VisionExpert, stage::kVisionExpert, attempt, step, std::move(b), {}};
    if (merge_ == MergeConfig::VisionInsightMerged) {
      spec.stage = stage::kMergedExpert;
      spec.images = q_.images;
    } else if (decision.expert == ExpertKind::Vision) {
      spec.images = q_.images;
    } else {
      spec.role = AgentRole::InsightExpert;
      spec.stage = stage::kInsightExpert;
    }
    auto result = invoke(env_, bindings_.at(spec.role), spec);
    // The insight expert's reasoning chain stays in the trace; only its
    // answer block is remembered.
    std::string content = (spec.role == AgentRole::VisionExpert && merge_ == MergeConfig::None)
                              ? std::string(detail::trim(result.text))
                              : extract_answer_block(result.text);
    memory_.append(MemoryEntry{decision.expert, decision.query, content, attempt, step});
    trace_.steps.push_back(make_step(spec, std::move(result), ExpertAnswer{std::move(content)}));
  }

  RefereeVerdict referee(int attempt, int step) {
    CallSpec spec{AgentRole::Referee, stage::kReferee, attempt, step, loop_bindings(q_, memory_), {}};
    auto result = invoke(env_, bindings_.at(AgentRole::Referee), spec);
    const Parsed<RefereeVerdict> parsed = parse_verdict(result.text);
    trace_.steps.push_back(make_step(spec, std::move(result), parsed.value, parsed.fallback));
    return parsed.value;
  }

  void summarize() {
    Bindings b = detail::question_bindings(q_, true);
    b["memory"] = memory_render(memory_);
    CallSpec spec{AgentRole::Summarizer, stage::kSummarizer, trace_.attempts_used,
                  std::max(1, trace_.steps_used_last_attempt), std::move(b), {}};
    auto result = invoke(env_, bindings_.at(AgentRole::Summarizer), spec);
    trace_.final = make_final_answer(result.text, q_);
    trace_.steps.push_back(make_step(spec, std::move(result), trace_.final));
  }

  void merged_perception() {
    trace_.attempts_used = 1;
    trace_.steps_used_last_attempt = 1;
    CallSpec spec{AgentRole::VisionExpert, stage::kMergedPerception, 1, 1,
                  detail::question_bindings(q_, false), q_.images};
    auto result = invoke(env_, bindings_.at(AgentRole::VisionExpert), spec);
    std::string content(detail::trim(result.text));
    memory_.append(MemoryEntry{ExpertKind::Vision, q_.question, content, 1, 1});
    trace_.steps.push_back(make_step(spec, std::move(result), ExpertAnswer{std::move(content)}));
  }

  void merged_all() {
    trace_.attempts_used = 1;
    trace_.steps_used_last_attempt = 0;
    CallSpec spec{AgentRole::Summarizer, stage::kMergedAll, 1, 1,
                  detail::question_bindings(q_, true), q_.images};
    auto result = invoke(env_, bindings_.at(AgentRole::VisionExpert), spec);
    trace_.final = make_final_answer(result.text, q_);
    trace_.steps.push_back(make_step(spec, std::move(result), trace_.final));
  }

  const QuestionInstance& q_;
  const PipelineEnv& env_;
  const RoleBinding& bindings_;
  const LoopPolicy& policy_;
  MergeConfig merge_;
  Memory memory_;
  RunTrace trace_;
};

}  // namespace

std::string proreason_method_name(MergeConfig merge) {
  switch (merge) {
    case MergeConfig::None: return "proreason";
    case MergeConfig::VisionInsightMerged: return "proreason+merge_vi";
    case MergeConfig::PerceptionMerged: return "proreason+merge_perception";
    case MergeConfig::AllMerged: return "proreason+merge_all";
  }
  return "proreason";
}

RunTrace run_proreason(const QuestionInstance& question, const PipelineEnv& env,
                       const RoleBinding& bindings, const LoopPolicy& policy, MergeConfig merge) {
  policy.validate();
  question.validate();
  bindings.validate(env.backends, merge);
  return ProReasonRun(question, env, bindings, policy, merge).run();
}

ExpertFrequencies expert_frequencies(std::span<const RunTrace> traces) {
  if (traces.empty()) throw EmptyInput("expert_frequencies needs at least one trace");
  double vision = 0;
  double insight = 0;
  for (const RunTrace& t : traces) {
    vision += t.count_role(AgentRole::VisionExpert);
    insight += t.count_role(AgentRole::InsightExpert);
  }
  const auto n = static_cast<double>(traces.size());
  return {vision / n, insight / n};
}

double iteration_stats(std::span<const RunTrace> traces) {
  if (traces.empty()) throw EmptyInput("iteration_stats needs at least one trace");
  double steps = 0;
  for (const RunTrace& t : traces) steps += t.perception_steps();
  return steps / static_cast<double>(traces.size());
}

}  // namespace vreason
