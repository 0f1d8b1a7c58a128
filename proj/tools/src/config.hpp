#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <vreason/openai_backend.hpp>
#include <vreason/pipeline.hpp>
#include <vreason/scripted_backend.hpp>

namespace vreason::cli {

struct BackendSpec {
  std::string id;
  std::string type;  // "openai" or "scripted"
  bool vision = true;
  // openai
  std::string base_url;
  std::string model;
  std::string api_key_env;
  std::chrono::seconds timeout{120};
  int max_retries = 3;
  double requests_per_minute = 0;
  // scripted
  std::vector<ScriptEntry> script;
};

// The structured run configuration:
//
//   {
//     "backends": {
//       "gpt": {"type": "openai", "base_url": "https://...", "model": "...",
//               "vision": true, "api_key_env": "OPENAI_API_KEY",
//               "timeout_s": 120, "max_retries": 3, "requests_per_minute": 60},
//       "fake": {"type": "scripted", "vision": true,
//                "script": [{"match": "Referee", "response": "SOLVABLE",
//                            "input_tokens": 10, "output_tokens": 2,
//                            "wall_time_ms": 5, "sticky": true}]}
//     },
//     "configurations": {
//       "default": {"*": "gpt", "summarizer": {"backend": "gpt", "model": "...",
//                                             "temperature": 0}}
//     },
//     "policy": {"max_steps_per_attempt": 5, "max_attempts": 5},
//     "workers": 4,
//     "templates": "prompts/",
//     "judge": "gpt",
//     "numeric_epsilon": 1e-6
//   }
//
// Relative paths resolve against the config file's directory.
struct AppConfig {
  std::map<std::string, BackendSpec> backends;
  std::map<std::string, RoleBinding> configurations;
  LoopPolicy policy;
  unsigned workers = 0;
  std::optional<std::filesystem::path> templates_dir;
  std::optional<RoleTarget> judge;
  double numeric_epsilon = 1e-6;

  // Throws ConfigError for an unknown name. With an empty name the only
  // configuration, or the one called "default", is chosen.
  const RoleBinding& configuration(const std::string& name) const;
  std::string configuration_name(const std::string& name) const;
};

// Throws ConfigError (or IoError if unreadable).
AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

// Instantiates the backends named in `ids`. A missing API-key variable is a
// ConfigError, raised before any backend is built.
BackendRegistry build_backends(const AppConfig& config, const std::set<std::string>& ids,
                               const EnvLookup& env = process_env);

std::set<std::string> backends_used(const RoleBinding& binding);

}  // namespace vreason::cli
