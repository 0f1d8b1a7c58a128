#pragma once

#include <cstddef>
#include <mutex>
#include <string>
#include <vector>

#include "vreason/backend.hpp"

namespace vreason {

// One programmed reply. An empty matcher is a wildcard; otherwise it fires
// when the rendered prompt contains it. A sticky entry is never consumed.
struct ScriptEntry {
  std::string matcher;
  std::string response;
  UsageStats usage;
  bool sticky = false;
};

// Deterministic backend for tests and offline fixtures. Each call takes the
// first entry whose matcher fires and removes it (unless sticky). Every
// request is kept so tests can inspect what was sent.
class ScriptedBackend final : public Backend {
 public:
  ScriptedBackend(std::string id, std::vector<ScriptEntry> script, bool vision_capable = true);

  const std::string& id() const override { return id_; }
  bool vision_capable() const override { return vision_capable_; }

  std::vector<ChatRequest> requests() const;
  std::size_t call_count() const;
  std::size_t remaining() const;

 protected:
  ChatResponse do_complete(const ChatRequest& request) override;

 private:
  std::string id_;
  bool vision_capable_;
  mutable std::mutex mu_;
  std::vector<ScriptEntry> script_;
  std::vector<ChatRequest> requests_;
};

}  // namespace vreason
