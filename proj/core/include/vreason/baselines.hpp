#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "vreason/pipeline.hpp"
#include "vreason/trace.hpp"

namespace vreason {

// Image-hash keyed store of VDGD captions. The caption prompt never sees
// the question, so one caption serves every question on the same image.
class CaptionCache {
 public:
  std::optional<std::string> find(std::uint64_t key) const;
  void put(std::uint64_t key, std::string caption);
  std::size_t size() const;

  // FNV-1a over the encoded bytes of every image, in order.
  static std::uint64_t key_for(const std::vector<ImageRef>& images);

 private:
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::string> captions_;
};

// Single image-bearing call with the question and options. Recorded as a
// Summarizer step.
RunTrace run_direct(const QuestionInstance& question, const PipelineEnv& env,
                    const RoleTarget& target);

// As run_direct with the step-by-step template.
RunTrace run_cot(const QuestionInstance& question, const PipelineEnv& env,
                 const RoleTarget& target);

// Caption the image, then answer with the caption prepended. A cache hit
// skips the first call and is recorded with `cached` set and zero usage.
RunTrace run_vdgd(const QuestionInstance& question, const PipelineEnv& env,
                  const RoleTarget& target, CaptionCache* cache = nullptr);

// Question-conditioned scene graph, then answer with the graph embedded.
RunTrace run_ccot(const QuestionInstance& question, const PipelineEnv& env,
                  const RoleTarget& target);

// Interleaved reason/act loop. The reasoner (the InsightExpert binding)
// sees the question and a growing transcript but never the image; each
// "ACT:" request is answered by the VisionExpert binding with the image.
// After max_steps_per_attempt * max_attempts reason steps without a
// "FINAL:" a forced final-answer prompt closes the run.
RunTrace run_react(const QuestionInstance& question, const PipelineEnv& env,
                   const RoleBinding& bindings, const LoopPolicy& policy);

}  // namespace vreason
