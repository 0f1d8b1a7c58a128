#pragma once

#include <chrono>
#include <mutex>
#include <random>
#include <string>

#include "vreason/backend.hpp"

namespace vreason {

struct OpenAIConfig {
  std::string id;
  // e.g. "https://api.openai.com/v1" or "http://localhost:8000/v1"; the
  // request goes to <base_url>/chat/completions.
  std::string base_url;
  std::string model;  // used when the request leaves model empty
  bool vision_capable = false;
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{120'000};
  RetryPolicy retry;
  double requests_per_minute = 0.0;  // 0 disables rate limiting
};

// Spaces requests at least 60/rpm seconds apart across all threads.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_minute);
  void acquire();

 private:
  std::chrono::steady_clock::duration interval_{};
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

// Wire-format helpers, exposed for testing.
std::string image_mime_type(const ImageRef& image, const ImageRef::Bytes& bytes);
std::string build_chat_payload(const ChatRequest& request, const std::string& default_model);
// Parses a chat-completions response body. Missing usage fields become
// unknown token counts. Throws ProtocolError on a malformed body.
ChatResponse parse_chat_completion(const std::string& body);

class OpenAIBackend final : public Backend {
 public:
  explicit OpenAIBackend(OpenAIConfig config);

  const std::string& id() const override { return config_.id; }
  bool vision_capable() const override { return config_.vision_capable; }

 protected:
  ChatResponse do_complete(const ChatRequest& request) override;

 private:
  double next_jitter_unit();

  OpenAIConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  RateLimiter limiter_;
  std::mutex rng_mu_;
  std::minstd_rand rng_{0x5eed};
};

}  // namespace vreason
