#include "vreason/pipeline.hpp"

#include "text_util.hpp"
#include "vreason/errors.hpp"

namespace vreason {

std::string_view to_string(MergeConfig merge) {
  switch (merge) {
    case MergeConfig::None: return "none";
    case MergeConfig::VisionInsightMerged: return "vision_insight";
    case MergeConfig::PerceptionMerged: return "perception";
    case MergeConfig::AllMerged: return "all";
  }
  return "none";
}

MergeConfig merge_config_from_string(std::string_view s) {
  for (MergeConfig m : {MergeConfig::None, MergeConfig::VisionInsightMerged,
                        MergeConfig::PerceptionMerged, MergeConfig::AllMerged}) {
    if (detail::iequals(to_string(m), s)) return m;
  }
  throw InvalidArgument("unknown merge configuration '" + std::string(s) + "'");
}

void BackendRegistry::add(BackendPtr backend) {
  if (!backend) throw InvalidArgument("null backend");
  const std::string id = backend->id();
  if (!backends_.emplace(id, std::move(backend)).second)
    throw ConfigError("duplicate backend id '" + id + "'");
}

bool BackendRegistry::contains(std::string_view id) const { return backends_.find(id) != backends_.end(); }

Backend& BackendRegistry::get(std::string_view id) const {
  const auto it = backends_.find(id);
  if (it == backends_.end()) throw ConfigError("unknown backend '" + std::string(id) + "'");
  return *it->second;
}

std::vector<std::string> BackendRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : backends_) out.push_back(id);
  return out;
}

RoleBinding RoleBinding::uniform(const RoleTarget& target) {
  RoleBinding b;
  for (AgentRole r : kAllRoles) b.roles[r] = target;
  return b;
}

const RoleTarget& RoleBinding::at(AgentRole role) const {
  const auto it = roles.find(role);
  if (it == roles.end()) throw ConfigError("role " + std::string(to_string(role)) + " is not bound");
  return it->second;
}

void RoleBinding::validate(const BackendRegistry& backends, MergeConfig merge) const {
  std::vector<AgentRole> needed;
  switch (merge) {
    case MergeConfig::None:
      needed.assign(std::begin(kAllRoles), std::end(kAllRoles));
      break;
    case MergeConfig::VisionInsightMerged:
      needed = {AgentRole::Dispatcher, AgentRole::VisionExpert, AgentRole::Referee,
                AgentRole::Summarizer};
      break;
    case MergeConfig::PerceptionMerged:
      needed = {AgentRole::VisionExpert, AgentRole::Summarizer};
      break;
    case MergeConfig::AllMerged:
      needed = {AgentRole::VisionExpert};
      break;
  }
  for (AgentRole role : needed) {
    const RoleTarget& target = at(role);
    const Backend& backend = backends.get(target.backend_id);
    if (role == AgentRole::VisionExpert && !backend.vision_capable())
      throw ConfigError("vision_expert is bound to text-only backend '" + target.backend_id + "'");
  }
}

}  // namespace vreason
