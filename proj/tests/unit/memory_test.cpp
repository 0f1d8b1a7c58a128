#include <gtest/gtest.h>

#include <random>

#include <vreason/errors.hpp>
#include <vreason/memory.hpp>

namespace vreason {
namespace {

TEST(Memory, RendersEmptyAsSentinel) { EXPECT_EQ(memory_render(Memory{}), "EMPTY"); }

TEST(Memory, RendersEntriesInOrder) {
  Memory m;
  m.append({ExpertKind::Vision, "what is on the left?", "a cat", 1, 1});
  m.append({ExpertKind::Insight, "how many legs?", "4", 1, 2});
  EXPECT_EQ(memory_render(m),
            "[1] (vision) Q: what is on the left? \xE2\x80\x94 A: a cat\n"
            "[2] (insight) Q: how many legs? \xE2\x80\x94 A: 4");
}

TEST(Memory, RejectsBadEntries) {
  Memory m;
  EXPECT_THROW(m.append({ExpertKind::Vision, "q", "   ", 1, 1}), InvalidArgument);
  EXPECT_THROW(m.append({ExpertKind::Vision, "q", "a", 0, 1}), InvalidArgument);
  EXPECT_THROW(m.append({ExpertKind::Vision, "q", "a", 1, 0}), InvalidArgument);
  m.append({ExpertKind::Vision, "q", "a", 2, 1});
  EXPECT_THROW(m.append({ExpertKind::Vision, "q", "b", 3, 1}), InvalidArgument);
}

TEST(Memory, ClearEmpties) {
  Memory m;
  m.append({ExpertKind::Vision, "q", "a", 1, 1});
  EXPECT_TRUE(memory_clear(m).empty());
}

TEST(Memory, OrderIsAppendOrder) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    Memory m;
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::string> contents;
    for (int i = 0; i < n; ++i) {
      contents.push_back("fact-" + std::to_string(rng()));
      m.append({rng() % 2 ? ExpertKind::Vision : ExpertKind::Insight, "q" + std::to_string(i),
                contents.back(), 1, i + 1});
    }
    ASSERT_EQ(m.size(), contents.size());
    const std::string rendered = memory_render(m);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < contents.size(); ++i) {
      EXPECT_EQ(m.entries()[i].content, contents[i]);
      const auto found = rendered.find("[" + std::to_string(i + 1) + "] ", pos);
      ASSERT_NE(found, std::string::npos);
      EXPECT_NE(rendered.find(contents[i], found), std::string::npos);
      pos = found + 1;
    }
  }
}

}  // namespace
}  // namespace vreason
