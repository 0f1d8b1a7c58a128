#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vreason/backend.hpp"
#include "vreason/prompt_template.hpp"
#include "vreason/types.hpp"

namespace vreason {

enum class MergeConfig { None, VisionInsightMerged, PerceptionMerged, AllMerged };

std::string_view to_string(MergeConfig merge);
MergeConfig merge_config_from_string(std::string_view s);

// Backends by id. Shared read-only by every pipeline.
class BackendRegistry {
 public:
  void add(BackendPtr backend);
  bool contains(std::string_view id) const;
  // Throws ConfigError for an unknown id.
  Backend& get(std::string_view id) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, BackendPtr, std::less<>> backends_;
};

// Which backend and model serve a role, plus per-role decoding settings.
struct RoleTarget {
  std::string backend_id;
  std::string model;  // empty: the backend's default model
  double temperature = 0.0;
  std::optional<int> max_output_tokens;

  bool operator==(const RoleTarget&) const = default;
};

struct RoleBinding {
  std::map<AgentRole, RoleTarget> roles;

  // Binds all five roles to the same target.
  static RoleBinding uniform(const RoleTarget& target);

  bool has(AgentRole role) const { return roles.count(role) != 0; }
  // Throws ConfigError if the role is unbound.
  const RoleTarget& at(AgentRole role) const;

  // Every role the merge variant calls must be bound to a known backend and
  // the image-seeing role must sit on a vision-capable one. Throws
  // ConfigError.
  void validate(const BackendRegistry& backends, MergeConfig merge = MergeConfig::None) const;
};

struct PipelineEnv {
  const TemplateRegistry& templates;
  const BackendRegistry& backends;
};

}  // namespace vreason
