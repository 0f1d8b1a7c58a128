#include "vreason/usage.hpp"

namespace vreason {

namespace {

std::optional<std::int64_t> add_known(std::optional<std::int64_t> a, std::optional<std::int64_t> b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

}  // namespace

UsageStats& UsageStats::operator+=(const UsageStats& other) {
  input_tokens = add_known(input_tokens, other.input_tokens);
  output_tokens = add_known(output_tokens, other.output_tokens);
  wall_time += other.wall_time;
  return *this;
}

}  // namespace vreason
