#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <vreason/dataset.hpp>
#include <vreason/errors.hpp>

#include "test_support.hpp"

namespace vreason {
namespace {

namespace fs = std::filesystem;

class DatasetTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vreason_dataset_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "img");
    std::ofstream png(dir_ / "img" / "a.png", std::ios::binary);
    const auto& bytes = testing::tiny_png();
    png.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& body, const std::string& name = "bench.jsonl") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

TEST_F(DatasetTest, ParsesAllAnswerKinds) {
  const auto path = write(
      R"({"id": "m1", "image": "img/a.png", "question": "Colour?", "choices": ["red", "blue"], "answer": "B"})"
      "\n\n"
      R"({"id": "y1", "image": "img/a.png", "question": "Is it red?", "answer": "No"})"
      "\n"
      R"({"id": "n1", "images": ["img/a.png", "img/a.png"], "question": "How many?", "answer": 12})"
      "\n"
      R"({"id": "f1", "image": "img/a.png", "question": "What is it?", "answer": "a square", "dataset": "other"})"
      "\n");
  const auto qs = load_dataset(path);
  ASSERT_EQ(qs.size(), 4u);
  EXPECT_EQ(qs[0].answer_kind, AnswerKind::MultipleChoice);
  EXPECT_EQ(qs[0].choices, (std::vector<Choice>{{"A", "red"}, {"B", "blue"}}));
  EXPECT_EQ(qs[0].ground_truth, "B");
  EXPECT_EQ(qs[0].dataset, "bench");
  EXPECT_EQ(qs[0].images.at(0).path(), dir_ / "img" / "a.png");
  EXPECT_EQ(qs[1].answer_kind, AnswerKind::YesNo);
  EXPECT_EQ(qs[2].answer_kind, AnswerKind::Numeric);
  EXPECT_EQ(qs[2].ground_truth, "12");
  EXPECT_EQ(qs[2].images.size(), 2u);
  EXPECT_EQ(qs[3].answer_kind, AnswerKind::FreeText);
  EXPECT_EQ(qs[3].dataset, "other");
}

TEST_F(DatasetTest, ChoiceTextAnswerMapsToLabel) {
  const auto path = write(
      R"({"id": "m1", "image": "img/a.png", "question": "Colour?", "choices": [{"label": "X", "text": "red"}, {"label": "Y", "text": "blue"}], "answer": "blue"})"
      "\n");
  const auto qs = load_dataset(path);
  EXPECT_EQ(qs.at(0).ground_truth, "Y");
}

TEST_F(DatasetTest, LetterNumberAnswerIsNotNumeric) {
  const auto path = write(
      R"({"id": "f", "image": "img/a.png", "question": "Cell?", "answer": "B2"})"
      "\n"
      R"({"id": "g", "image": "img/a.png", "question": "Total?", "answer": "1,234.5"})"
      "\n"
      R"({"id": "h", "image": "img/a.png", "question": "Unit?", "answer": "3", "answer_type": "free_text"})"
      "\n");
  const auto qs = load_dataset(path);
  EXPECT_EQ(qs[0].answer_kind, AnswerKind::FreeText);
  EXPECT_EQ(qs[1].answer_kind, AnswerKind::Numeric);
  EXPECT_EQ(qs[2].answer_kind, AnswerKind::FreeText);
}

TEST_F(DatasetTest, MissingAnswerLeavesGroundTruthEmpty) {
  const auto path = write(R"({"id": "u", "image": "img/a.png", "question": "What?"})" "\n");
  const auto qs = load_dataset(path);
  EXPECT_FALSE(qs.at(0).ground_truth.has_value());
}

std::size_t schema_index(const fs::path& path) {
  try {
    load_dataset(path);
  } catch (const SchemaError& e) {
    return e.index();
  }
  ADD_FAILURE() << "expected SchemaError";
  return 999;
}

TEST_F(DatasetTest, SchemaErrorsNameTheRecord) {
  const std::string good = R"({"id": "ok", "image": "img/a.png", "question": "Q?"})" "\n";
  EXPECT_EQ(schema_index(write(good + R"({"image": "img/a.png", "question": "Q?"})" "\n")), 1u);
  EXPECT_EQ(schema_index(write(good + "{not json\n")), 1u);
  EXPECT_EQ(schema_index(write(good + good)), 1u);
  EXPECT_EQ(schema_index(write(
                R"({"id": "m", "image": "img/a.png", "question": "Q?", "choices": ["a", "b"], "answer": "Z"})" "\n")),
            0u);
  EXPECT_EQ(schema_index(write(
                R"({"id": "t", "image": "img/a.png", "question": "Q?", "answer_type": "essay"})" "\n")),
            0u);
  EXPECT_EQ(schema_index(write(R"({"id": "c", "question": "Q?", "choices": [1, 2]})" "\n")), 0u);
}

TEST_F(DatasetTest, MissingImageAndFile) {
  const auto path = write(R"({"id": "x", "image": "img/nope.png", "question": "Q?"})" "\n");
  EXPECT_THROW(load_dataset(path), MissingImage);
  DatasetOptions lazy;
  lazy.check_images = false;
  EXPECT_EQ(load_dataset(path, lazy).size(), 1u);
  EXPECT_THROW(load_dataset(dir_ / "absent.jsonl"), IoError);
}

TEST_F(DatasetTest, OptionsOverrideNameAndRoot) {
  const auto path = write(R"({"id": "x", "image": "a.png", "question": "Q?"})" "\n");
  DatasetOptions opts;
  opts.dataset_name = "mine";
  opts.image_root = dir_ / "img";
  const auto qs = load_dataset(path, opts);
  EXPECT_EQ(qs.at(0).dataset, "mine");
  EXPECT_EQ(qs.at(0).images.at(0).load(), testing::tiny_png());
}

}  // namespace
}  // namespace vreason
