#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vreason/types.hpp"

namespace vreason {

struct MemoryEntry {
  ExpertKind source = ExpertKind::Vision;
  std::string query;
  std::string content;
  int attempt = 1;
  int step = 1;

  bool operator==(const MemoryEntry&) const = default;
};

// Ordered store of expert answers for the current attempt. Only expert
// outputs go in here; dispatcher and referee text never does.
class Memory {
 public:
  // Throws InvalidArgument on empty content, non-positive attempt/step, or
  // an attempt number different from the entries already stored.
  void append(MemoryEntry entry);

  const std::vector<MemoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  bool operator==(const Memory&) const = default;

 private:
  std::vector<MemoryEntry> entries_;
};

inline constexpr const char* kEmptyMemory = "EMPTY";

// One line per entry: "[k] (vision) Q: <query> — A: <content>", or
// kEmptyMemory when there are no entries.
std::string memory_render(const Memory& memory);

Memory memory_clear(const Memory& memory);

}  // namespace vreason
