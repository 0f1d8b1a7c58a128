#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vreason/types.hpp"
#include "vreason/usage.hpp"

namespace vreason {

enum class MessageRole { System, User, Assistant };

std::string_view to_string(MessageRole role);

struct ChatMessage {
  MessageRole role = MessageRole::User;
  std::string text;
  std::vector<ImageRef> images;  // user messages only
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<int> max_output_tokens;
  std::string model;

  // Throws InvalidArgument: no messages, last message not from the user,
  // images on a non-user message, or negative temperature.
  void validate() const;

  // Message texts joined by newlines. Scripted matchers run against this.
  std::string rendered_prompt() const;
  int image_count() const;
};

struct ChatResponse {
  std::string text;
  UsageStats usage;
};

// Retries apply to transport errors, HTTP 429 and HTTP 5xx only.
struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_backoff{500};
  std::chrono::milliseconds max_backoff{30'000};
  double jitter = 0.25;  // fraction of the delay added at random

  // Delay before retry number `retry` (1-based). `unit` in [0,1) picks the
  // jitter amount.
  std::chrono::milliseconds backoff(int retry, double unit) const;
};

// Uniform model-invocation contract. Implementations must be safe to call
// from several pipelines at once.
class Backend {
 public:
  virtual ~Backend() = default;

  // Validates the request, rejects images on text-only backends with
  // CapabilityError, then dispatches to the implementation.
  ChatResponse complete(const ChatRequest& request);

  virtual const std::string& id() const = 0;
  virtual bool vision_capable() const = 0;

 protected:
  virtual ChatResponse do_complete(const ChatRequest& request) = 0;
};

using BackendPtr = std::shared_ptr<Backend>;

inline ChatResponse complete(Backend& backend, const ChatRequest& request) {
  return backend.complete(request);
}

}  // namespace vreason
