#include "step_runner.hpp"

#include "text_util.hpp"
#include "vreason/errors.hpp"

namespace vreason::detail {

CallResult invoke(const PipelineEnv& env, const RoleTarget& target, const CallSpec& spec) {
  const std::string role(to_string(spec.role));
  try {
    CallResult out;
    out.prompt = render_prompt(env.templates.get(spec.stage), spec.bindings);
    ChatRequest request;
    request.messages.push_back(ChatMessage{MessageRole::User, out.prompt, spec.images});
    request.temperature = target.temperature;
    request.max_output_tokens = target.max_output_tokens;
    request.model = target.model;
    ChatResponse response = env.backends.get(target.backend_id).complete(request);
    if (trim(response.text).empty()) throw EmptyResponse("backend returned an empty completion");
    out.text = std::move(response.text);
    out.usage = response.usage;
    return out;
  } catch (const BackendError&) {
    throw;
  } catch (const Error& e) {
    throw BackendError(role, spec.attempt, spec.step, e.what());
  }
}

StepRecord make_step(const CallSpec& spec, CallResult result, ParsedOutput parsed, bool fallback) {
  StepRecord s;
  s.role = spec.role;
  s.stage = spec.stage;
  s.attempt = spec.attempt;
  s.step = spec.step;
  s.prompt = std::move(result.prompt);
  s.raw_response = std::move(result.text);
  s.parsed = std::move(parsed);
  s.usage = result.usage;
  s.image_count = static_cast<int>(spec.images.size());
  s.parse_fallback = fallback;
  return s;
}

Bindings question_bindings(const QuestionInstance& q, bool with_choices) {
  Bindings b{{"question", q.question}};
  if (with_choices) b["choices"] = q.choices.empty() ? "None" : q.render_choices();
  return b;
}

}  // namespace vreason::detail
