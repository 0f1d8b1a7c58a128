#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <vreason/errors.hpp>
#include <vreason/eval.hpp>
#include <vreason/trace_io.hpp>

#include "test_support.hpp"

namespace vreason {
namespace {

namespace fs = std::filesystem;

TEST(ParseMethod, KnownNames) {
  EXPECT_EQ(parse_method("direct"), (MethodSpec{MethodKind::Direct}));
  EXPECT_EQ(parse_method(" ReAct "), (MethodSpec{MethodKind::React}));
  EXPECT_EQ(parse_method("proreason+merge_vi"),
            (MethodSpec{MethodKind::ProReason, MergeConfig::VisionInsightMerged}));
  EXPECT_THROW(parse_method("proreason+merge"), InvalidArgument);
  EXPECT_THROW(parse_method("gpt"), InvalidArgument);
  for (const char* name : {"direct", "cot", "vdgd", "ccot", "react", "proreason",
                           "proreason+merge_vi", "proreason+merge_perception", "proreason+merge_all"})
    EXPECT_EQ(parse_method(name).name(), name);
}

TEST(ParseMethod, ListsExpandAndDeduplicate) {
  const auto all = parse_method_list("all");
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all.back().name(), "proreason");
  const auto some = parse_method_list("proreason, direct,proreason,,cot");
  ASSERT_EQ(some.size(), 3u);
  EXPECT_EQ(some[0].name(), "proreason");
  EXPECT_EQ(some[2].name(), "cot");
  EXPECT_THROW(parse_method_list(" , "), InvalidArgument);
  EXPECT_THROW(parse_method_list("direct,nope"), InvalidArgument);
}

struct Fixture {
  std::shared_ptr<ScriptedBackend> backend;
  BackendRegistry registry;
  TemplateRegistry templates = TemplateRegistry::defaults();
  RoleBinding binding = RoleBinding::uniform({"model"});
  std::vector<QuestionInstance> questions;

  explicit Fixture(int n_questions = 4, UsageStats u = {})
      : backend(std::make_shared<ScriptedBackend>("model", testing::all_methods_script("B", u))) {
    registry.add(backend);
    for (int i = 0; i < n_questions; ++i)
      questions.push_back(testing::mc_question("q" + std::to_string(i), i % 2 ? "A" : "B"));
  }
  PipelineEnv env() const { return {templates, registry}; }
};

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Evaluation, AllMethodsScoreAndOrder) {
  Fixture f;
  EvalOptions opts;
  opts.methods = parse_method_list("all,proreason+merge_vi,proreason+merge_perception,proreason+merge_all");
  opts.workers = 4;
  const EvalOutcome out = run_evaluation(f.questions, f.env(), f.binding, opts);
  EXPECT_TRUE(out.failures.empty());
  ASSERT_EQ(out.traces.size(), 9u * 4u);
  for (std::size_t i = 0; i < out.traces.size(); ++i) {
    EXPECT_EQ(out.traces[i].method, opts.methods[i / 4].name());
    EXPECT_EQ(out.traces[i].question_id, "q" + std::to_string(i % 4));
    EXPECT_EQ(out.traces[i].final.extracted, "B") << out.traces[i].method;
    EXPECT_EQ(out.traces[i].correct, i % 2 == 0);
  }
  ASSERT_TRUE(out.report);
  ASSERT_EQ(out.report->rows.size(), 9u);
  for (const EvalRow& row : out.report->rows) {
    EXPECT_EQ(row.n, 4);
    EXPECT_EQ(row.accuracy(), 50.0) << row.method;
  }
  EXPECT_EQ(out.executed, 36u);
}

TEST(Evaluation, TraceFileIsIndependentOfWorkerCount) {
  TempDir dir("vreason_eval_workers");
  std::string first;
  for (unsigned workers : {1u, 3u, 8u}) {
    Fixture f(6);
    EvalOptions opts;
    opts.methods = parse_method_list("direct,vdgd,proreason");
    opts.workers = workers;
    opts.trace_path = dir.path / ("w" + std::to_string(workers) + ".jsonl");
    run_evaluation(f.questions, f.env(), f.binding, opts);
    const std::string bytes = slurp(opts.trace_path);
    if (first.empty()) first = bytes;
    EXPECT_EQ(bytes, first) << workers;
  }
}

TEST(Evaluation, ResumeSkipsFinishedPairs) {
  TempDir dir("vreason_eval_resume");
  EvalOptions opts;
  opts.methods = parse_method_list("direct,proreason");
  opts.workers = 2;
  opts.trace_path = dir.path / "traces.jsonl";
  {
    Fixture f(3);
    f.questions.pop_back();
    const EvalOutcome out = run_evaluation(f.questions, f.env(), f.binding, opts);
    EXPECT_EQ(out.executed, 4u);
  }
  Fixture f(3);
  const std::size_t before = f.backend->call_count();
  const EvalOutcome out = run_evaluation(f.questions, f.env(), f.binding, opts);
  EXPECT_EQ(out.resumed, 4u);
  EXPECT_EQ(out.executed, 2u);
  EXPECT_EQ(out.traces.size(), 6u);
  EXPECT_GT(f.backend->call_count(), before);
  const auto on_disk = read_trace_file(opts.trace_path);
  ASSERT_EQ(on_disk.size(), 6u);
  EXPECT_EQ(on_disk[2].question_id, "q2");
  EXPECT_EQ(on_disk[3].method, "proreason");

  // A full rerun executes nothing and leaves the file unchanged.
  const std::string bytes = slurp(opts.trace_path);
  Fixture again(3);
  const EvalOutcome idle = run_evaluation(again.questions, again.env(), again.binding, opts);
  EXPECT_EQ(idle.executed, 0u);
  EXPECT_EQ(again.backend->call_count(), 0u);
  EXPECT_EQ(slurp(opts.trace_path), bytes);

  // Without resume the file starts over.
  opts.resume = false;
  opts.methods = parse_method_list("cot");
  Fixture fresh(3);
  run_evaluation(fresh.questions, fresh.env(), fresh.binding, opts);
  EXPECT_EQ(read_trace_file(opts.trace_path).size(), 3u);
}

TEST(Evaluation, ResumeKeepsUnrelatedTraces) {
  TempDir dir("vreason_eval_unrelated");
  EvalOptions opts;
  opts.methods = parse_method_list("cot");
  opts.trace_path = dir.path / "traces.jsonl";
  Fixture f(2);
  run_evaluation(f.questions, f.env(), f.binding, opts);
  opts.methods = parse_method_list("direct");
  const EvalOutcome out = run_evaluation(f.questions, f.env(), f.binding, opts);
  EXPECT_EQ(out.traces.size(), 2u);
  const auto on_disk = read_trace_file(opts.trace_path);
  ASSERT_EQ(on_disk.size(), 4u);
  EXPECT_EQ(on_disk[0].method, "direct");
  EXPECT_EQ(on_disk[3].method, "cot");
}

TEST(Evaluation, FailuresAreIsolated) {
  Fixture f(3);
  auto broken = std::make_shared<ScriptedBackend>(
      "broken", std::vector<ScriptEntry>{testing::sticky("square?\n\nOptions", "Answer: B")});
  f.registry.add(broken);
  f.binding.roles[AgentRole::VisionExpert] = {"broken"};
  f.questions[1].question = "Which shape?";
  EvalOptions opts;
  opts.methods = parse_method_list("direct");
  opts.workers = 3;
  const EvalOutcome out = run_evaluation(f.questions, f.env(), f.binding, opts);
  ASSERT_EQ(out.failures.size(), 1u);
  EXPECT_EQ(out.failures[0].question_id, "q1");
  EXPECT_EQ(out.traces.size(), 2u);
  ASSERT_TRUE(out.report);
  EXPECT_EQ(out.report->rows.at(0).n, 2);
}

TEST(Evaluation, BindingProblemsFailBeforeAnyCall) {
  Fixture f(2);
  auto text_only = std::make_shared<ScriptedBackend>(
      "text", std::vector<ScriptEntry>{testing::sticky("", "Answer: B")}, false);
  f.registry.add(text_only);
  f.binding.roles[AgentRole::VisionExpert] = {"text"};
  EvalOptions opts;
  opts.methods = parse_method_list("direct");
  EXPECT_THROW(run_evaluation(f.questions, f.env(), f.binding, opts), ConfigError);
  opts.methods.clear();
  EXPECT_THROW(run_evaluation(f.questions, f.env(), f.binding, opts), InvalidArgument);
  EXPECT_EQ(f.backend->call_count() + text_only->call_count(), 0u);
}

TEST(Evaluation, StopFlagPreventsNewQuestions) {
  Fixture f(5);
  std::atomic<bool> stop{true};
  EvalOptions opts;
  opts.methods = parse_method_list("direct");
  opts.stop = &stop;
  const EvalOutcome out = run_evaluation(f.questions, f.env(), f.binding, opts);
  EXPECT_TRUE(out.interrupted);
  EXPECT_TRUE(out.traces.empty());
  EXPECT_FALSE(out.report.has_value());
  EXPECT_EQ(f.backend->call_count(), 0u);
}

TEST(Evaluation, CaptionCacheSharesAcrossQuestions) {
  Fixture f(4);
  EvalOptions opts;
  opts.methods = parse_method_list("vdgd");
  opts.workers = 1;
  run_evaluation(f.questions, f.env(), f.binding, opts);
  EXPECT_EQ(f.backend->call_count(), 5u);
  Fixture g(4);
  opts.cache_captions = false;
  run_evaluation(g.questions, g.env(), g.binding, opts);
  EXPECT_EQ(g.backend->call_count(), 8u);
}

TEST(Evaluation, UsageSumsMatchReport) {
  Fixture f(3, testing::usage(11, 5, 700));
  EvalOptions opts;
  opts.methods = parse_method_list("proreason");
  const EvalOutcome out = run_evaluation(f.questions, f.env(), f.binding, opts);
  // Each solvable-at-once run: dispatcher, vision, referee, summarizer.
  for (const RunTrace& t : out.traces) EXPECT_EQ(t.total_usage, testing::usage(44, 20, 2800));
  const EvalRow& row = out.report->rows.at(0);
  EXPECT_EQ(row.input_tokens_sum, 132);
  EXPECT_EQ(row.mean_input_tokens(), 44.0);
  EXPECT_EQ(row.mean_output_tokens(), 20.0);
  EXPECT_EQ(row.wall_time_us_sum, 8400);
}

}  // namespace
}  // namespace vreason
