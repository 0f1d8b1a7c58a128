#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <vreason/errors.hpp>
#include <vreason/prompt_template.hpp>

namespace vreason {
namespace {

namespace fs = std::filesystem;

TEST(PromptTemplate, SubstitutesPlaceholders) {
  const PromptTemplate t("x", "Q: {question}\nM: {memory}");
  EXPECT_EQ(render_prompt(t, {{"question", "why?"}, {"memory", "EMPTY"}}), "Q: why?\nM: EMPTY");
  EXPECT_EQ(t.placeholders(), (std::vector<std::string>{"question", "memory"}));
  EXPECT_TRUE(t.uses("memory"));
  EXPECT_FALSE(t.uses("query"));
}

TEST(PromptTemplate, MissingBindingNamesThePlaceholder) {
  const PromptTemplate t("x", "{question} {query}");
  try {
    render_prompt(t, {{"question", "q"}});
    FAIL() << "expected MissingBinding";
  } catch (const MissingBinding& e) {
    EXPECT_NE(std::string(e.what()).find("{query}"), std::string::npos);
  }
}

TEST(PromptTemplate, UnknownPlaceholderRejectedAtConstruction) {
  EXPECT_THROW(PromptTemplate("x", "{question} {colour}"), UnknownPlaceholder);
}

TEST(PromptTemplate, BracesThatAreNotPlaceholdersStayLiteral) {
  const PromptTemplate t("x", R"({{"objects": []}} {"a": 1} {Question} {question})");
  EXPECT_EQ(render_prompt(t, {{"question", "Q"}}), R"({"objects": []} {"a": 1} {Question} Q)");
}

TEST(PromptTemplate, SubstitutionIsSinglePass) {
  const PromptTemplate t("x", "{question}|{memory}");
  EXPECT_EQ(render_prompt(t, {{"question", "{memory}"}, {"memory", "m"}}), "{memory}|m");
}

TEST(PromptTemplate, InjectiveInEachBindingPosition) {
  const TemplateRegistry reg = TemplateRegistry::defaults();
  std::mt19937 rng(3);
  auto random_text = [&rng] {
    std::string s;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) s += static_cast<char>('a' + rng() % 26);
    return s;
  };
  for (const std::string& id : TemplateRegistry::known_ids()) {
    const PromptTemplate& t = reg.get(id);
    for (const std::string& name : t.placeholders()) {
      for (int trial = 0; trial < 25; ++trial) {
        Bindings b;
        for (const std::string& other : t.placeholders()) b[other] = random_text();
        Bindings b2 = b;
        b2[name] = b[name] + "x" + random_text();
        EXPECT_NE(render_prompt(t, b), render_prompt(t, b2)) << id << " {" << name << "}";
      }
    }
  }
}

TEST(TemplateRegistry, DefaultsCoverEveryStage) {
  const TemplateRegistry reg = TemplateRegistry::defaults();
  for (const char* id :
       {stage::kDispatcher, stage::kVisionExpert, stage::kInsightExpert, stage::kReferee,
        stage::kSummarizer, stage::kMergedExpert, stage::kMergedPerception, stage::kMergedAll,
        stage::kDirect, stage::kCot, stage::kVdgdCaption, stage::kVdgdAnswer,
        stage::kCcotSceneGraph, stage::kCcotAnswer, stage::kReactReason, stage::kReactAct,
        stage::kReactFinal, stage::kJudgeCaption, stage::kJudgeReasoning}) {
    EXPECT_NO_THROW(reg.get(id)) << id;
  }
  EXPECT_EQ(TemplateRegistry::known_ids().size(), 19u);
  EXPECT_THROW(reg.get("nope"), ConfigError);
}

TEST(TemplateRegistry, RoleTemplatesKeepImagesAwayFromTextRoles) {
  const TemplateRegistry reg = TemplateRegistry::defaults();
  EXPECT_TRUE(reg.get(stage::kVisionExpert).uses("query"));
  EXPECT_FALSE(reg.get(stage::kVisionExpert).uses("memory"));
  EXPECT_TRUE(reg.get(stage::kInsightExpert).uses("memory"));
  EXPECT_TRUE(reg.get(stage::kDispatcher).uses("memory"));
  EXPECT_TRUE(reg.get(stage::kSummarizer).uses("choices"));
  EXPECT_FALSE(reg.get(stage::kDispatcher).uses("choices"));
}

TEST(TemplateRegistry, LoadsOverridesFromDirectory) {
  const fs::path dir = fs::temp_directory_path() / "vreason_tmpl_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "referee.txt") << "Judge: {question}\n{memory}\n\n";
  std::ofstream(dir / "notes.md") << "ignored";
  TemplateRegistry reg = TemplateRegistry::defaults();
  reg.load_directory(dir);
  EXPECT_EQ(reg.get("referee").text(), "Judge: {question}\n{memory}");

  std::ofstream(dir / "mystery.txt") << "x";
  EXPECT_THROW(reg.load_directory(dir), ConfigError);
  fs::remove(dir / "mystery.txt");
  std::ofstream(dir / "dispatcher.txt") << "{nonsense}";
  EXPECT_THROW(reg.load_directory(dir), UnknownPlaceholder);
  fs::remove_all(dir);
  EXPECT_THROW(reg.load_directory(dir), ConfigError);
}

}  // namespace
}  // namespace vreason
