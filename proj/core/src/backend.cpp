#include "vreason/backend.hpp"

#include <algorithm>
#include <cmath>

#include "vreason/errors.hpp"

namespace vreason {

std::string_view to_string(MessageRole role) {
  switch (role) {
    case MessageRole::System: return "system";
    case MessageRole::User: return "user";
    case MessageRole::Assistant: return "assistant";
  }
  return "user";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw InvalidArgument("chat request has no messages");
  if (messages.back().role != MessageRole::User)
    throw InvalidArgument("last chat message must come from the user");
  for (const ChatMessage& m : messages) {
    if (!m.images.empty() && m.role != MessageRole::User)
      throw InvalidArgument("images are only allowed on user messages");
  }
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
}

std::string ChatRequest::rendered_prompt() const {
  std::string out;
  for (const ChatMessage& m : messages) {
    if (!out.empty()) out += '\n';
    out += m.text;
  }
  return out;
}

int ChatRequest::image_count() const {
  int n = 0;
  for (const ChatMessage& m : messages) n += static_cast<int>(m.images.size());
  return n;
}

std::chrono::milliseconds RetryPolicy::backoff(int retry, double unit) const {
  const double exp = std::ldexp(static_cast<double>(base_backoff.count()), std::max(0, retry - 1));
  const double capped = std::min(exp, static_cast<double>(max_backoff.count()));
  const double jittered = capped * (1.0 + jitter * std::clamp(unit, 0.0, 1.0));
  return std::chrono::milliseconds(static_cast<std::int64_t>(jittered));
}

ChatResponse Backend::complete(const ChatRequest& request) {
  request.validate();
  if (request.image_count() > 0 && !vision_capable())
    throw CapabilityError("backend '" + id() + "' is text-only but the request carries " +
                          std::to_string(request.image_count()) + " image(s)");
  return do_complete(request);
}

}  // namespace vreason
