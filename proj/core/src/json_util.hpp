#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "vreason/usage.hpp"

namespace vreason::detail {

using json = nlohmann::json;

inline json optional_to_json(const std::optional<std::int64_t>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json optional_to_json(const std::optional<std::string>& v) {
  return v ? json(*v) : json(nullptr);
}

inline std::optional<std::int64_t> optional_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::int64_t>();
}

inline std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

inline json usage_to_json(const UsageStats& u) {
  return json{{"input_tokens", optional_to_json(u.input_tokens)},
              {"output_tokens", optional_to_json(u.output_tokens)},
              {"wall_time_us", u.wall_time.count()}};
}

inline UsageStats usage_from_json(const json& j) {
  UsageStats u;
  u.input_tokens = optional_int(j, "input_tokens");
  u.output_tokens = optional_int(j, "output_tokens");
  u.wall_time = std::chrono::microseconds(j.at("wall_time_us").get<std::int64_t>());
  return u;
}

}  // namespace vreason::detail
