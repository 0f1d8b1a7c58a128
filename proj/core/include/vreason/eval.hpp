#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vreason/answer.hpp"
#include "vreason/baselines.hpp"
#include "vreason/orchestrator.hpp"
#include "vreason/report.hpp"

namespace vreason {

enum class MethodKind { Direct, Cot, Vdgd, Ccot, React, ProReason };

struct MethodSpec {
  MethodKind kind = MethodKind::ProReason;
  MergeConfig merge = MergeConfig::None;  // ProReason only

  // The name recorded in RunTrace::method.
  std::string name() const;
  bool operator==(const MethodSpec&) const = default;
};

// Accepts direct, cot, vdgd, ccot, react, proreason and
// proreason+merge_vi / +merge_perception / +merge_all. Throws
// InvalidArgument otherwise.
MethodSpec parse_method(std::string_view name);

// Comma-separated list; "all" expands to the six base methods.
std::vector<MethodSpec> parse_method_list(std::string_view list);

// The single-model baselines run on the VisionExpert binding; ReAct reasons
// with the InsightExpert binding and observes with the VisionExpert one.
RunTrace run_method(const MethodSpec& method, const QuestionInstance& question,
                    const PipelineEnv& env, const RoleBinding& bindings, const LoopPolicy& policy,
                    CaptionCache* caption_cache = nullptr);

// Throws ConfigError if `bindings` cannot serve `method`.
void validate_method_bindings(const MethodSpec& method, const RoleBinding& bindings,
                              const BackendRegistry& backends);

struct EvalOptions {
  std::vector<MethodSpec> methods;
  LoopPolicy policy;
  unsigned workers = 0;  // 0: one per hardware thread
  double numeric_epsilon = kDefaultNumericEpsilon;
  // Traces are appended here as they finish; the file is then rewritten in
  // canonical order (methods as given, then questions as given).
  std::filesystem::path trace_path;
  // Keep traces already in trace_path and skip their (method, question).
  bool resume = true;
  bool cache_captions = true;
  // Checked between questions; once set no new question starts.
  const std::atomic<bool>* stop = nullptr;
};

struct EvalFailure {
  std::string method;
  std::string question_id;
  std::string message;
};

struct EvalOutcome {
  std::vector<RunTrace> traces;  // this run's methods x questions, canonical order
  std::vector<EvalRecord> records;
  std::optional<EvalReport> report;  // empty when no trace completed
  std::vector<EvalFailure> failures;
  std::size_t resumed = 0;
  std::size_t executed = 0;
  bool interrupted = false;
};

// Runs every method over every question on a bounded worker pool. Each
// question runs sequentially inside its pipeline; questions run
// concurrently. A failing question is recorded in `failures` and does not
// stop the others.
EvalOutcome run_evaluation(const std::vector<QuestionInstance>& questions, const PipelineEnv& env,
                           const RoleBinding& bindings, const EvalOptions& options);

}  // namespace vreason
