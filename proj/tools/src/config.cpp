#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <vreason/errors.hpp>

namespace vreason::cli {

namespace {

using json = nlohmann::json;

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type");
  }
}

RoleTarget parse_target(const json& j, const std::string& where) {
  RoleTarget t;
  if (j.is_string()) {
    t.backend_id = j.get<std::string>();
    return t;
  }
  if (!j.is_object()) throw ConfigError(where + ": expected a backend id or an object");
  t.backend_id = get_or<std::string>(j, "backend", "", where);
  if (t.backend_id.empty()) throw ConfigError(where + ": missing 'backend'");
  t.model = get_or<std::string>(j, "model", "", where);
  t.temperature = get_or<double>(j, "temperature", 0.0, where);
  if (j.contains("max_output_tokens")) t.max_output_tokens = get_or<int>(j, "max_output_tokens", 0, where);
  return t;
}

BackendSpec parse_backend(const std::string& id, const json& j) {
  const std::string where = "backend '" + id + "'";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  BackendSpec b;
  b.id = id;
  b.type = get_or<std::string>(j, "type", "openai", where);
  b.vision = get_or<bool>(j, "vision", true, where);
  if (b.type == "openai") {
    b.base_url = get_or<std::string>(j, "base_url", "", where);
    b.model = get_or<std::string>(j, "model", "", where);
    if (b.base_url.empty()) throw ConfigError(where + ": missing 'base_url'");
    if (b.model.empty()) throw ConfigError(where + ": missing 'model'");
    b.api_key_env = get_or<std::string>(j, "api_key_env", "", where);
    b.timeout = std::chrono::seconds(get_or<int>(j, "timeout_s", 120, where));
    b.max_retries = get_or<int>(j, "max_retries", 3, where);
    b.requests_per_minute = get_or<double>(j, "requests_per_minute", 0.0, where);
    if (b.max_retries < 0) throw ConfigError(where + ": max_retries must be >= 0");
  } else if (b.type == "scripted") {
    if (!j.contains("script") || !j.at("script").is_array() || j.at("script").empty())
      throw ConfigError(where + ": scripted backend needs a non-empty 'script' list");
    for (const json& e : j.at("script")) {
      if (!e.is_object()) throw ConfigError(where + ": script entries must be objects");
      ScriptEntry entry;
      entry.matcher = get_or<std::string>(e, "match", "", where);
      entry.response = get_or<std::string>(e, "response", "", where);
      entry.sticky = get_or<bool>(e, "sticky", false, where);
      entry.usage.input_tokens = e.contains("input_tokens") && e.at("input_tokens").is_null()
                                     ? std::nullopt
                                     : std::optional<std::int64_t>(get_or<std::int64_t>(e, "input_tokens", 0, where));
      entry.usage.output_tokens = e.contains("output_tokens") && e.at("output_tokens").is_null()
                                      ? std::nullopt
                                      : std::optional<std::int64_t>(get_or<std::int64_t>(e, "output_tokens", 0, where));
      entry.usage.wall_time = std::chrono::milliseconds(get_or<std::int64_t>(e, "wall_time_ms", 0, where));
      b.script.push_back(std::move(entry));
    }
  } else {
    throw ConfigError(where + ": unknown type '" + b.type + "' (expected openai or scripted)");
  }
  return b;
}

RoleBinding parse_configuration(const std::string& name, const json& j) {
  const std::string where = "configuration '" + name + "'";
  if (!j.is_object()) throw ConfigError(where + ": expected an object of role bindings");
  RoleBinding binding;
  if (j.contains("*")) binding = RoleBinding::uniform(parse_target(j.at("*"), where + " role '*'"));
  for (const auto& [role, target] : j.items()) {
    if (role == "*") continue;
    AgentRole r;
    try {
      r = agent_role_from_string(role);
    } catch (const InvalidArgument&) {
      throw ConfigError(where + ": unknown role '" + role + "'");
    }
    binding.roles[r] = parse_target(target, where + " role '" + role + "'");
  }
  return binding;
}

}  // namespace

const RoleBinding& AppConfig::configuration(const std::string& name) const {
  return configurations.at(configuration_name(name));
}

std::string AppConfig::configuration_name(const std::string& name) const {
  if (!name.empty()) {
    if (!configurations.count(name)) throw ConfigError("unknown configuration '" + name + "'");
    return name;
  }
  if (configurations.count("default")) return "default";
  if (configurations.size() == 1) return configurations.begin()->first;
  throw ConfigError("several configurations and none called 'default'; pick one with --binding");
}

AppConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  AppConfig c;
  if (!j.contains("backends") || !j.at("backends").is_object() || j.at("backends").empty())
    throw ConfigError("config needs a non-empty 'backends' object");
  for (const auto& [id, spec] : j.at("backends").items()) c.backends.emplace(id, parse_backend(id, spec));

  if (!j.contains("configurations") || !j.at("configurations").is_object() ||
      j.at("configurations").empty())
    throw ConfigError("config needs a non-empty 'configurations' object");
  for (const auto& [name, roles] : j.at("configurations").items()) {
    RoleBinding binding = parse_configuration(name, roles);
    for (const auto& [role, target] : binding.roles) {
      if (!c.backends.count(target.backend_id))
        throw ConfigError("configuration '" + name + "' role " + std::string(to_string(role)) +
                          " names unknown backend '" + target.backend_id + "'");
    }
    c.configurations.emplace(name, std::move(binding));
  }

  if (j.contains("policy")) {
    const json& p = j.at("policy");
    c.policy.max_steps_per_attempt = get_or<int>(p, "max_steps_per_attempt", 5, "policy");
    c.policy.max_attempts = get_or<int>(p, "max_attempts", 5, "policy");
    try {
      c.policy.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("policy: ") + e.what());
    }
  }
  const int workers = get_or<int>(j, "workers", 0, "config");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  c.workers = static_cast<unsigned>(workers);
  if (j.contains("templates") && !j.at("templates").is_null()) {
    std::filesystem::path dir = get_or<std::string>(j, "templates", "", "config");
    c.templates_dir = dir.is_relative() ? base_dir / dir : dir;
  }
  if (j.contains("judge") && !j.at("judge").is_null()) {
    c.judge = parse_target(j.at("judge"), "judge");
    if (!c.backends.count(c.judge->backend_id))
      throw ConfigError("judge names unknown backend '" + c.judge->backend_id + "'");
  }
  c.numeric_epsilon = get_or<double>(j, "numeric_epsilon", 1e-6, "config");
  if (c.numeric_epsilon < 0) throw ConfigError("numeric_epsilon must be >= 0");
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::optional<std::string> process_env(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

std::set<std::string> backends_used(const RoleBinding& binding) {
  std::set<std::string> ids;
  for (const auto& [role, target] : binding.roles) ids.insert(target.backend_id);
  return ids;
}

BackendRegistry build_backends(const AppConfig& config, const std::set<std::string>& ids,
                               const EnvLookup& env) {
  std::map<std::string, std::string> keys;
  for (const std::string& id : ids) {
    const auto it = config.backends.find(id);
    if (it == config.backends.end()) throw ConfigError("unknown backend '" + id + "'");
    const BackendSpec& b = it->second;
    if (b.type == "openai" && !b.api_key_env.empty()) {
      const auto key = env(b.api_key_env);
      if (!key || key->empty())
        throw ConfigError("backend '" + id + "': environment variable " + b.api_key_env +
                          " is not set");
      keys[id] = *key;
    }
  }
  BackendRegistry registry;
  for (const std::string& id : ids) {
    const BackendSpec& b = config.backends.at(id);
    if (b.type == "scripted") {
      registry.add(std::make_shared<ScriptedBackend>(id, b.script, b.vision));
      continue;
    }
    OpenAIConfig oc;
    oc.id = id;
    oc.base_url = b.base_url;
    oc.model = b.model;
    oc.vision_capable = b.vision;
    oc.api_key = keys.count(id) ? keys.at(id) : std::string();
    oc.timeout = b.timeout;
    oc.retry.max_retries = b.max_retries;
    oc.requests_per_minute = b.requests_per_minute;
    registry.add(std::make_shared<OpenAIBackend>(std::move(oc)));
  }
  return registry;
}

}  // namespace vreason::cli
