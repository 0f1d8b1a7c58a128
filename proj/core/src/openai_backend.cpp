#include "vreason/openai_backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <thread>

#include "json_util.hpp"
#include "text_util.hpp"
#include "vreason/base64.hpp"
#include "vreason/errors.hpp"

namespace vreason {

namespace {

using detail::json;

bool starts_with_bytes(const ImageRef::Bytes& b, std::initializer_list<int> magic) {
  if (b.size() < magic.size()) return false;
  std::size_t i = 0;
  for (int m : magic) {
    if (b[i++] != static_cast<std::uint8_t>(m)) return false;
  }
  return true;
}

json message_to_json(const ChatMessage& m) {
  if (m.images.empty()) return json{{"role", to_string(m.role)}, {"content", m.text}};
  json parts = json::array();
  parts.push_back(json{{"type", "text"}, {"text", m.text}});
  for (const ImageRef& image : m.images) {
    const ImageRef::Bytes bytes = image.load();
    const std::string url = "data:" + image_mime_type(image, bytes) + ";base64," + base64_encode(bytes);
    parts.push_back(json{{"type", "image_url"}, {"image_url", json{{"url", url}}}});
  }
  return json{{"role", to_string(m.role)}, {"content", std::move(parts)}};
}

std::optional<std::int64_t> usage_field(const json& usage, const char* key) {
  if (!usage.is_object() || !usage.contains(key) || !usage.at(key).is_number_integer())
    return std::nullopt;
  const auto v = usage.at(key).get<std::int64_t>();
  if (v < 0) return std::nullopt;
  return v;
}

struct BaseUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

BaseUrl split_base_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("backend base_url '" + url + "' has no scheme");
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("backend base_url '" + url + "' must be http or https");
  const auto path_start = url.find('/', scheme_end + 3);
  BaseUrl out;
  out.scheme_host_port = url.substr(0, path_start);
  out.path_prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

std::optional<std::chrono::milliseconds> retry_after(const httplib::Result& res) {
  if (!res || !res->has_header("Retry-After")) return std::nullopt;
  try {
    const double seconds = std::stod(res->get_header_value("Retry-After"));
    if (seconds < 0) return std::nullopt;
    return std::chrono::milliseconds(static_cast<std::int64_t>(std::min(seconds, 60.0) * 1000));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string image_mime_type(const ImageRef& image, const ImageRef::Bytes& bytes) {
  if (starts_with_bytes(bytes, {0x89, 'P', 'N', 'G'})) return "image/png";
  if (starts_with_bytes(bytes, {0xFF, 0xD8, 0xFF})) return "image/jpeg";
  if (starts_with_bytes(bytes, {'G', 'I', 'F', '8'})) return "image/gif";
  if (bytes.size() >= 12 && starts_with_bytes(bytes, {'R', 'I', 'F', 'F'}) && bytes[8] == 'W' &&
      bytes[9] == 'E' && bytes[10] == 'B' && bytes[11] == 'P')
    return "image/webp";
  if (image.is_path()) {
    const std::string ext = detail::to_lower(image.path().extension().string());
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".gif") return "image/gif";
    if (ext == ".webp") return "image/webp";
  }
  return "image/png";
}

std::string build_chat_payload(const ChatRequest& request, const std::string& default_model) {
  json messages = json::array();
  for (const ChatMessage& m : request.messages) messages.push_back(message_to_json(m));
  json body{{"model", request.model.empty() ? default_model : request.model},
            {"messages", std::move(messages)},
            {"temperature", request.temperature}};
  if (request.max_output_tokens) body["max_tokens"] = *request.max_output_tokens;
  return body.dump();
}

ChatResponse parse_chat_completion(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("choices") || !j.at("choices").is_array() ||
      j.at("choices").empty())
    throw ProtocolError("response has no choices");
  const json& choice = j.at("choices").at(0);
  if (!choice.is_object() || !choice.contains("message") || !choice.at("message").is_object())
    throw ProtocolError("response choice has no message");
  const json& message = choice.at("message");
  ChatResponse out;
  if (message.contains("content") && message.at("content").is_string()) {
    out.text = message.at("content").get<std::string>();
  } else if (message.contains("content") && message.at("content").is_array()) {
    for (const json& part : message.at("content")) {
      if (part.is_object() && part.value("type", "") == "text") out.text += part.value("text", "");
    }
  } else if (!message.contains("content") || !message.at("content").is_null()) {
    throw ProtocolError("response message content is neither text nor parts");
  }
  const json usage = j.contains("usage") ? j.at("usage") : json();
  out.usage.input_tokens = usage_field(usage, "prompt_tokens");
  out.usage.output_tokens = usage_field(usage, "completion_tokens");
  return out;
}

RateLimiter::RateLimiter(double requests_per_minute) {
  if (requests_per_minute > 0) {
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(60.0 / requests_per_minute));
  }
}

void RateLimiter::acquire() {
  if (interval_.count() == 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

OpenAIBackend::OpenAIBackend(OpenAIConfig config)
    : config_(std::move(config)), limiter_(config_.requests_per_minute) {
  const BaseUrl base = split_base_url(config_.base_url);
  scheme_host_port_ = base.scheme_host_port;
  path_prefix_ = base.path_prefix;
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme_host_port_.rfind("https", 0) == 0)
    throw ConfigError("backend '" + config_.id + "': built without TLS support, cannot use https");
#endif
}

double OpenAIBackend::next_jitter_unit() {
  std::lock_guard lock(rng_mu_);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
}

ChatResponse OpenAIBackend::do_complete(const ChatRequest& request) {
  const auto started = std::chrono::steady_clock::now();
  const std::string payload = build_chat_payload(request, config_.model);
  const std::string path = path_prefix_ + "/chat/completions";

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_failure;
  for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(config_.retry.backoff(attempt, next_jitter_unit()));
    }
    limiter_.acquire();

    httplib::Client client(scheme_host_port_);
    const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout);
    client.set_connection_timeout(timeout_us);
    client.set_read_timeout(timeout_us);
    client.set_write_timeout(timeout_us);

    httplib::Result res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status == 200) {
      ChatResponse out = parse_chat_completion(res->body);
      out.usage.wall_time = std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - started);
      return out;
    }
    const std::string excerpt = res->body.substr(0, 300);
    if (status == 429 || status >= 500) {
      last_failure = "HTTP " + std::to_string(status) + ": " + excerpt;
      if (const auto wait = retry_after(res); wait && attempt < config_.retry.max_retries)
        std::this_thread::sleep_for(*wait);
      continue;
    }
    throw ProtocolError("backend '" + config_.id + "' returned HTTP " + std::to_string(status) +
                        ": " + excerpt);
  }
  throw TransportError("backend '" + config_.id + "' failed after " +
                       std::to_string(config_.retry.max_retries) + " retries; last: " + last_failure);
}

}  // namespace vreason
