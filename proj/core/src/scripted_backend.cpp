#include "vreason/scripted_backend.hpp"

#include "vreason/errors.hpp"

namespace vreason {

ScriptedBackend::ScriptedBackend(std::string id, std::vector<ScriptEntry> script, bool vision_capable)
    : id_(std::move(id)), vision_capable_(vision_capable), script_(std::move(script)) {
  if (script_.empty()) throw InvalidArgument("scripted backend '" + id_ + "' has an empty script");
}

std::vector<ChatRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mu_);
  return script_.size();
}

ChatResponse ScriptedBackend::do_complete(const ChatRequest& request) {
  const std::string prompt = request.rendered_prompt();
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  if (script_.empty()) throw ScriptExhausted("scripted backend '" + id_ + "' has no entries left");
  for (auto it = script_.begin(); it != script_.end(); ++it) {
    if (!it->matcher.empty() && prompt.find(it->matcher) == std::string::npos) continue;
    ChatResponse response{it->response, it->usage};
    if (!it->sticky) script_.erase(it);
    return response;
  }
  throw NoMatch("scripted backend '" + id_ + "': no entry matches the prompt");
}

}  // namespace vreason
