#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include <vreason/errors.hpp>
#include <vreason/report.hpp>

#include "test_support.hpp"

namespace vreason {
namespace {

EvalRecord record(std::string method, bool correct, UsageStats u = {}, std::string dataset = "d") {
  EvalRecord r;
  r.question_id = "q";
  r.dataset = std::move(dataset);
  r.method = std::move(method);
  r.extracted = correct ? "A" : "B";
  r.ground_truth = "A";
  r.correct = correct;
  r.usage = u;
  return r;
}

TEST(Score, ThreeOfFourIsSeventyFive) {
  const std::vector<EvalRecord> rs = {record("m", true), record("m", true), record("m", false),
                                      record("m", true)};
  const EvalReport rep = score(rs);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].accuracy(), 75.0);
}

TEST(Score, UsageMeansOverKnownCounts) {
  const std::vector<EvalRecord> rs = {record("m", true, testing::usage(100, 10, 1'000'000)),
                                      record("m", true, testing::usage(300, 30, 3'000'000))};
  const EvalRow row = score(rs).rows.at(0);
  EXPECT_EQ(row.mean_input_tokens(), 200.0);
  EXPECT_EQ(row.mean_output_tokens(), 20.0);
  EXPECT_EQ(row.mean_wall_time_s(), 2.0);

  std::vector<EvalRecord> with_unknown = rs;
  with_unknown.push_back(record("m", true, UsageStats::unknown_tokens()));
  const EvalRow row2 = score(with_unknown).rows.at(0);
  EXPECT_EQ(row2.mean_input_tokens(), 200.0);
  EXPECT_EQ(row2.n, 3);
  EXPECT_EQ(row2.input_tokens_known, 2);

  const std::vector<EvalRecord> none = {record("m", true, UsageStats::unknown_tokens())};
  EXPECT_FALSE(score(none).rows.at(0).mean_input_tokens().has_value());
}

TEST(Score, RowsSortByDatasetThenMethod) {
  const std::vector<EvalRecord> rs = {record("proreason", true, {}, "mme"), record("direct", false, {}, "mme"),
                                      record("cot", true, {}, "aaa")};
  const EvalReport rep = score(rs);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows[0].dataset, "aaa");
  EXPECT_EQ(rep.rows[1].method, "direct");
  EXPECT_EQ(rep.rows[2].method, "proreason");
}

TEST(Score, ErrorsOnEmptyOrMixedGroundTruth) {
  EXPECT_THROW(score({}), EmptyInput);
  EvalRecord unscored = record("m", true);
  unscored.ground_truth.reset();
  unscored.correct.reset();
  const std::vector<EvalRecord> mixed = {record("m", true), unscored};
  EXPECT_THROW(score(mixed), InvalidArgument);
  const std::vector<EvalRecord> only_unscored = {unscored};
  EXPECT_FALSE(score(only_unscored).rows.at(0).accuracy().has_value());
}

TEST(Score, AccuracyIsPermutationInvariant) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EvalRecord> rs;
    int correct = 0;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      const bool ok = rng() % 2 == 0;
      correct += ok;
      rs.push_back(record(rng() % 2 ? "a" : "b", ok, testing::usage(rng() % 1000, rng() % 100)));
    }
    const EvalReport base = score(rs);
    std::shuffle(rs.begin(), rs.end(), rng);
    EXPECT_EQ(score(rs), base);
    std::int64_t total_correct = 0, total_n = 0;
    for (const EvalRow& r : base.rows) {
      total_correct += r.correct;
      total_n += r.n;
    }
    EXPECT_EQ(total_correct, correct);
    EXPECT_EQ(total_n, n);
  }
}

TEST(MakeEvalRecord, CountsLoopStats) {
  RunTrace t;
  t.question_id = "q1";
  t.method = "proreason";
  t.attempts_used = 2;
  t.final.extracted = "B";
  StepRecord s;
  s.parsed = ExpertAnswer{"x"};
  s.role = AgentRole::VisionExpert;
  t.steps = {s, s};
  s.role = AgentRole::InsightExpert;
  t.steps.push_back(s);
  const EvalRecord r = make_eval_record(t, testing::mc_question("q1", "B"));
  EXPECT_EQ(r.correct, true);
  EXPECT_EQ(r.dataset, "unit");
  EXPECT_EQ(r.iterations, 3);
  EXPECT_EQ(r.vision_calls, 2);
  EXPECT_EQ(r.insight_calls, 1);
  EXPECT_EQ(r.attempts, 2);

  t.final.extracted.reset();
  EXPECT_EQ(make_eval_record(t, testing::mc_question("q1", "B")).correct, false);
  QuestionInstance no_truth = testing::mc_question("q1");
  no_truth.ground_truth.reset();
  EXPECT_FALSE(make_eval_record(t, no_truth).correct.has_value());
}

TEST(Render, SingleRowHasEveryColumn) {
  const std::vector<EvalRecord> rs = {record("direct", true, testing::usage(100, 10, 1'500'000))};
  const std::string table = report_render_table(score(rs));
  for (const char* col : {"dataset", "method", "n", "acc%", "in_tok", "out_tok", "time_s", "iters",
                          "vision", "insight"})
    EXPECT_NE(table.find(col), std::string::npos) << col;
  EXPECT_NE(table.find("100.0"), std::string::npos);
  EXPECT_NE(table.find("1.50"), std::string::npos);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
}

TEST(Render, JsonRoundTrip) {
  const std::vector<EvalRecord> rs = {record("b", true, testing::usage(7, 3, 11)),
                                      record("a", false, UsageStats::unknown_tokens()),
                                      record("a", true, testing::usage(1, 2, 3), "z")};
  const EvalReport rep = score(rs);
  const std::string text = report_to_json(rep);
  EXPECT_EQ(report_from_json(text), rep);
  EXPECT_EQ(report_to_json(report_from_json(text)), text);
  EXPECT_THROW(report_from_json("{\"rows\": [{}]}"), ParseError);
  EXPECT_THROW(report_from_json("nope"), ParseError);
}

}  // namespace
}  // namespace vreason
