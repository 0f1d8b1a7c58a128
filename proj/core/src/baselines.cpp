#include "vreason/baselines.hpp"

#include "step_runner.hpp"
#include "text_util.hpp"
#include "vreason/answer.hpp"
#include "vreason/errors.hpp"
#include "vreason/parsers.hpp"

namespace vreason {

namespace {

using detail::CallSpec;
using detail::invoke;
using detail::make_step;

void require_vision(const PipelineEnv& env, const RoleTarget& target, std::string_view method) {
  if (!env.backends.get(target.backend_id).vision_capable())
    throw ConfigError(std::string(method) + ": backend '" + target.backend_id +
                      "' cannot accept images");
}

RunTrace start_trace(const QuestionInstance& q, std::string method) {
  q.validate();
  RunTrace t;
  t.question_id = q.id;
  t.dataset = q.dataset;
  t.method = std::move(method);
  t.attempts_used = 1;
  return t;
}

RunTrace finish(RunTrace t) {
  t.recompute_usage();
  return t;
}

RunTrace single_call(const QuestionInstance& q, const PipelineEnv& env, const RoleTarget& target,
                     const char* stage_id, const char* method) {
  require_vision(env, target, method);
  RunTrace t = start_trace(q, method);
  CallSpec spec{AgentRole::Summarizer, stage_id, 1, 1, detail::question_bindings(q, true), q.images};
  auto result = invoke(env, target, spec);
  t.final = make_final_answer(result.text, q);
  t.steps.push_back(make_step(spec, std::move(result), t.final));
  return finish(std::move(t));
}

// Context stage (caption or scene graph) followed by the answer stage with
// the context bound under `context_name`.
RunTrace two_stage(const QuestionInstance& q, const PipelineEnv& env, const RoleTarget& target,
                   const char* method, const char* context_stage, const char* answer_stage,
                   const char* context_name, CaptionCache* cache) {
  require_vision(env, target, method);
  RunTrace t = start_trace(q, method);
  t.steps_used_last_attempt = 1;

  CallSpec first{AgentRole::VisionExpert, context_stage, 1, 1, detail::question_bindings(q, false),
                 q.images};
  std::string context;
  std::optional<std::uint64_t> key;
  if (cache) key = CaptionCache::key_for(q.images);
  if (const auto hit = key ? cache->find(*key) : std::nullopt) {
    context = *hit;
    StepRecord s;
    s.role = first.role;
    s.stage = first.stage;
    s.prompt = render_prompt(env.templates.get(first.stage), first.bindings);
    s.raw_response = context;
    s.parsed = ExpertAnswer{context};
    s.image_count = static_cast<int>(q.images.size());
    s.cached = true;
    t.steps.push_back(std::move(s));
  } else {
    auto result = invoke(env, target, first);
    context = std::string(detail::trim(result.text));
    if (key) cache->put(*key, context);
    t.steps.push_back(make_step(first, std::move(result), ExpertAnswer{context}));
  }

  Bindings b = detail::question_bindings(q, true);
  b[context_name] = context;
  CallSpec second{AgentRole::Summarizer, answer_stage, 1, 2, std::move(b), q.images};
  auto result = invoke(env, target, second);
  t.final = make_final_answer(result.text, q);
  t.steps.push_back(make_step(second, std::move(result), t.final));
  return finish(std::move(t));
}

}  // namespace

std::optional<std::string> CaptionCache::find(std::uint64_t key) const {
  std::lock_guard lock(mu_);
  const auto it = captions_.find(key);
  if (it == captions_.end()) return std::nullopt;
  return it->second;
}

void CaptionCache::put(std::uint64_t key, std::string caption) {
  std::lock_guard lock(mu_);
  captions_.insert_or_assign(key, std::move(caption));
}

std::size_t CaptionCache::size() const {
  std::lock_guard lock(mu_);
  return captions_.size();
}

std::uint64_t CaptionCache::key_for(const std::vector<ImageRef>& images) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (const ImageRef& image : images) {
    for (std::uint8_t byte : image.load()) mix(byte);
    mix(0xFF);  // image boundary
  }
  return h;
}

RunTrace run_direct(const QuestionInstance& question, const PipelineEnv& env,
                    const RoleTarget& target) {
  return single_call(question, env, target, stage::kDirect, "direct");
}

RunTrace run_cot(const QuestionInstance& question, const PipelineEnv& env,
                 const RoleTarget& target) {
  return single_call(question, env, target, stage::kCot, "cot");
}

RunTrace run_vdgd(const QuestionInstance& question, const PipelineEnv& env,
                  const RoleTarget& target, CaptionCache* cache) {
  return two_stage(question, env, target, "vdgd", stage::kVdgdCaption, stage::kVdgdAnswer,
                   "caption", cache);
}

RunTrace run_ccot(const QuestionInstance& question, const PipelineEnv& env,
                  const RoleTarget& target) {
  return two_stage(question, env, target, "ccot", stage::kCcotSceneGraph, stage::kCcotAnswer,
                   "scene_graph", nullptr);
}

RunTrace run_react(const QuestionInstance& question, const PipelineEnv& env,
                   const RoleBinding& bindings, const LoopPolicy& policy) {
  policy.validate();
  const RoleTarget& reasoner = bindings.at(AgentRole::InsightExpert);
  const RoleTarget& observer = bindings.at(AgentRole::VisionExpert);
  env.backends.get(reasoner.backend_id);
  require_vision(env, observer, "react");
  RunTrace t = start_trace(question, "react");

  std::string transcript;
  auto transcript_binding = [&transcript] {
    return transcript.empty() ? std::string("(nothing yet)") : transcript;
  };

  const int budget = policy.max_steps_per_attempt * policy.max_attempts;
  for (int k = 1; k <= budget; ++k) {
    Bindings b = detail::question_bindings(question, true);
    b["transcript"] = transcript_binding();
    CallSpec reason{AgentRole::Dispatcher, stage::kReactReason, 1, k, std::move(b), {}};
    auto result = invoke(env, reasoner, reason);
    const ReactStep parsed = parse_react(result.text);

    if (parsed.kind == ReactStep::Kind::Final) {
      reason.role = AgentRole::Summarizer;
      t.final = make_final_answer(result.text, question);
      t.final.extracted =
          extract_answer("Answer: " + parsed.text, question.answer_kind, question.choices);
      t.steps.push_back(make_step(reason, std::move(result), t.final, parsed.fallback));
      return finish(std::move(t));
    }

    const std::string raw(detail::trim(result.text));
    t.steps.push_back(make_step(reason, std::move(result),
                                DispatchDecision{ExpertKind::Vision, parsed.text},
                                parsed.fallback));

    CallSpec act{AgentRole::VisionExpert, stage::kReactAct, 1, k, Bindings{{"query", parsed.text}},
                 question.images};
    auto observation = invoke(env, observer, act);
    const std::string obs(detail::trim(observation.text));
    t.steps.push_back(make_step(act, std::move(observation), ExpertAnswer{obs}));
    t.steps_used_last_attempt = k;

    transcript += "[Step " + std::to_string(k) + "]\n" + raw + "\nObservation: " + obs + "\n";
  }

  Bindings b = detail::question_bindings(question, true);
  b["transcript"] = transcript_binding();
  CallSpec forced{AgentRole::Summarizer, stage::kReactFinal, 1, budget + 1, std::move(b), {}};
  auto result = invoke(env, reasoner, forced);
  t.final = make_final_answer(result.text, question);
  t.steps.push_back(make_step(forced, std::move(result), t.final));
  return finish(std::move(t));
}

}  // namespace vreason
