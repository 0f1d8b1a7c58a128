#include "vreason/memory.hpp"

#include "text_util.hpp"
#include "vreason/errors.hpp"

namespace vreason {

void Memory::append(MemoryEntry entry) {
  if (detail::trim(entry.content).empty()) throw InvalidArgument("memory entry content is empty");
  if (entry.attempt < 1 || entry.step < 1)
    throw InvalidArgument("memory entry attempt and step must be >= 1");
  if (!entries_.empty() && entries_.front().attempt != entry.attempt)
    throw InvalidArgument("memory entry from attempt " + std::to_string(entry.attempt) +
                          " appended to memory of attempt " +
                          std::to_string(entries_.front().attempt));
  entries_.push_back(std::move(entry));
}

std::string memory_render(const Memory& memory) {
  if (memory.empty()) return kEmptyMemory;
  std::string out;
  std::size_t k = 1;
  for (const MemoryEntry& e : memory.entries()) {
    if (k > 1) out += '\n';
    out += "[" + std::to_string(k++) + "] (" + std::string(to_string(e.source)) + ") Q: " +
           e.query + " \xE2\x80\x94 A: " + e.content;
  }
  return out;
}

Memory memory_clear(const Memory&) { return Memory{}; }

}  // namespace vreason
