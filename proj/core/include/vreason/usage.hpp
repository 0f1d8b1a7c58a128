#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

namespace vreason {

// Token and latency accounting for one or more model calls. A token count
// the backend did not report stays std::nullopt; adding an unknown to
// anything yields unknown for that component.
struct UsageStats {
  std::optional<std::int64_t> input_tokens = 0;
  std::optional<std::int64_t> output_tokens = 0;
  std::chrono::microseconds wall_time{0};

  static UsageStats unknown_tokens(std::chrono::microseconds wall = {}) {
    return UsageStats{std::nullopt, std::nullopt, wall};
  }

  UsageStats& operator+=(const UsageStats& other);
  friend UsageStats operator+(UsageStats lhs, const UsageStats& rhs) { return lhs += rhs; }
  bool operator==(const UsageStats&) const = default;
};

}  // namespace vreason
