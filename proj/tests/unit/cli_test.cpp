#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <vreason/distill.hpp>
#include <vreason/errors.hpp>
#include <vreason/report.hpp>
#include <vreason/trace_io.hpp>

#include "cli.hpp"
#include "config.hpp"

namespace vreason {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = fs::path(VREASON_FIXTURES) / "cli";

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "vreason");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vreason_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config() const { return (kFixtures / "config.json").string(); }
  std::string dataset() const { return (kFixtures / "dataset.jsonl").string(); }

  fs::path dir_;
};

TEST_F(CliTest, EvalDirectAndProReason) {
  const auto r = run({"eval", "--config", config(), "--dataset", dataset(), "--methods",
                      "direct,proreason", "--out", (dir_ / "out").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const EvalReport report = read_report_file(dir_ / "out" / "report.json");
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].method, "direct");
  EXPECT_EQ(report.rows[1].method, "proreason");
  for (const EvalRow& row : report.rows) {
    EXPECT_EQ(row.dataset, "dataset");
    EXPECT_EQ(row.n, 2);
    EXPECT_EQ(row.accuracy(), 50.0);
  }
  // proreason: 4 calls of (10 in, 5 out, 3 ms) per question.
  EXPECT_EQ(report.rows[1].mean_input_tokens(), 40.0);
  EXPECT_EQ(report.rows[1].wall_time_us_sum, 2 * 4 * 3000);
  EXPECT_EQ(read_trace_file(dir_ / "out" / "traces.jsonl").size(), 4u);
  EXPECT_NE(r.out.find("acc%"), std::string::npos);
  EXPECT_NE(r.out.find("configuration default: 4 run, 0 resumed, 0 failed"), std::string::npos);
}

TEST_F(CliTest, EvalAllMethodsAndOverrides) {
  const auto r = run({"eval", "--config", config(), "--dataset", dataset(), "--out",
                      (dir_ / "out").string(), "--max-attempts", "2", "--max-steps", "3",
                      "--workers", "1", "--methods", "all,proreason+merge_all"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(read_report_file(dir_ / "out" / "report.json").rows.size(), 7u);
}

TEST_F(CliTest, EvalUnknownMethodIsUsageError) {
  const auto r = run({"eval", "--config", config(), "--dataset", dataset(), "--methods",
                      "direct,telepathy", "--out", (dir_ / "out").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("unknown method 'telepathy'"), std::string::npos);
  EXPECT_NE(r.err.find("--methods"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, EvalMissingApiKeyFailsBeforeAnyRequest) {
  ::unsetenv("VREASON_FIXTURE_UNSET_KEY");
  const auto r = run({"eval", "--config", config(), "--dataset", dataset(), "--binding", "live",
                      "--methods", "direct", "--out", (dir_ / "out").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("VREASON_FIXTURE_UNSET_KEY"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, EvalBadInputsAreUsageErrors) {
  EXPECT_EQ(run({"eval", "--config", (dir_ / "none.json").string(), "--dataset", dataset()}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"eval", "--config", config(), "--dataset", (dir_ / "none.jsonl").string()}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"eval", "--config", config(), "--dataset", dataset(), "--binding", "nope"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"eval", "--config", config(), "--dataset", dataset(), "--max-attempts", "0"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"eval", "--dataset", dataset()}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, cli::kExitOk);
  EXPECT_NE(help.out.find("distill"), std::string::npos);
}

TEST_F(CliTest, EvalIsIdempotent) {
  auto once = [&](const std::string& name) {
    const auto r = run({"eval", "--config", config(), "--dataset", dataset(), "--methods",
                        "all", "--out", (dir_ / name).string(), "--workers", "4"});
    EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  };
  once("a");
  once("b");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  EXPECT_EQ(slurp(dir_ / "a" / "traces.jsonl"), slurp(dir_ / "b" / "traces.jsonl"));
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
  // A rerun into the same directory resumes everything and changes nothing.
  const std::string before = slurp(dir_ / "a" / "traces.jsonl");
  const auto again = run({"eval", "--config", config(), "--dataset", dataset(), "--methods",
                          "all", "--out", (dir_ / "a").string()});
  EXPECT_NE(again.out.find("0 run, 12 resumed"), std::string::npos) << again.out;
  EXPECT_EQ(slurp(dir_ / "a" / "traces.jsonl"), before);
}

TEST_F(CliTest, JudgeWritesScores) {
  ASSERT_EQ(run({"eval", "--config", config(), "--dataset", dataset(), "--methods", "proreason",
                 "--out", (dir_ / "out").string()})
                .code,
            cli::kExitOk);
  const auto r = run({"judge", "--config", config(), "--traces", (dir_ / "out" / "traces.jsonl").string(),
                      "--references", (kFixtures / "references.jsonl").string(), "--out",
                      (dir_ / "scores.jsonl").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::ifstream in(dir_ / "scores.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    EXPECT_NE(line.find("\"RE\":4"), std::string::npos) << line;
  }
  EXPECT_EQ(n, 2);
  EXPECT_NE(r.out.find("True"), std::string::npos);
  EXPECT_NE(r.out.find("judged 2, skipped 0, failed 0"), std::string::npos);

  const auto caption = run({"judge", "--config", config(), "--traces",
                            (dir_ / "out" / "traces.jsonl").string(), "--references",
                            (kFixtures / "references.jsonl").string(), "--rubric", "caption",
                            "--out", (dir_ / "cap.jsonl").string()});
  // The scripted judge never prints caption labels, so both items fail after a re-ask.
  EXPECT_EQ(caption.code, cli::kExitFailure);
  EXPECT_NE(caption.out.find("failed 2"), std::string::npos);
}

TEST_F(CliTest, JudgeEmptyOrMalformedTraces) {
  const fs::path empty = dir_ / "empty.jsonl";
  std::ofstream(empty).close();
  const auto r = run({"judge", "--config", config(), "--traces", empty.string(), "--references",
                      (kFixtures / "references.jsonl").string(), "--out", (dir_ / "s.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "s.jsonl"));

  const fs::path bad = dir_ / "bad.jsonl";
  {
    RunTrace t;
    t.question_id = "q1";
    t.method = "direct";
    std::ofstream out(bad);
    out << trace_to_line(t) << "\n" << trace_to_line(t) << "\n{oops\n";
  }
  const auto m = run({"judge", "--config", config(), "--traces", bad.string(), "--references",
                      (kFixtures / "references.jsonl").string(), "--out", (dir_ / "s.jsonl").string()});
  EXPECT_EQ(m.code, cli::kExitUsage);
  EXPECT_NE(m.err.find("line 3"), std::string::npos) << m.err;
  EXPECT_FALSE(fs::exists(dir_ / "s.jsonl"));
}

TEST_F(CliTest, DistillAgreementAndDisagreement) {
  const std::string one = (kFixtures / "one_question.jsonl").string();
  const auto agree = run({"distill", "--config", config(), "--dataset", one, "--config-a",
                          "default", "--config-b", "agree", "--out", (dir_ / "a.jsonl").string()});
  ASSERT_EQ(agree.code, cli::kExitOk) << agree.err;
  const auto records = read_sft_file(dir_ / "a.jsonl");
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].agreed_answer, "B");
  EXPECT_EQ(records[0].messages.at(1).content,
            "<think>The square is blue, which is option B.</think>\nAnswer: B");
  EXPECT_EQ(records[0].source_configs, (std::vector<std::string>{"default", "agree"}));
  EXPECT_NE(agree.out.find("1 questions: 1 agreed, 0 disagreed, 0 failed"), std::string::npos);

  const auto disagree = run({"distill", "--config", config(), "--dataset", one, "--config-a",
                             "default", "--config-b", "disagree", "--out",
                             (dir_ / "d.jsonl").string(), "--parallel"});
  ASSERT_EQ(disagree.code, cli::kExitOk) << disagree.err;
  EXPECT_TRUE(read_sft_file(dir_ / "d.jsonl").empty());
  EXPECT_NE(disagree.out.find("0 agreed, 1 disagreed"), std::string::npos);
}

TEST_F(CliTest, DistillIdenticalConfigsWarnsAndProceeds) {
  const auto r = run({"distill", "--config", config(), "--dataset", dataset(), "--config-a",
                      "default", "--config-b", "default", "--out", (dir_ / "s.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(read_sft_file(dir_ / "s.jsonl").size(), 2u);
}

TEST_F(CliTest, DistillUnknownConfigurationIsUsageError) {
  const auto r = run({"distill", "--config", config(), "--dataset", dataset(), "--config-a",
                      "default", "--config-b", "ghost", "--out", (dir_ / "s.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "s.jsonl"));
}

TEST(Config, ParsesTargetsAndDefaults) {
  const cli::AppConfig c = cli::parse_config(R"({
    "backends": {"m": {"type": "scripted", "script": [{"match": "", "response": "x", "input_tokens": null}]}},
    "configurations": {"only": {"*": "m", "referee": {"backend": "m", "model": "small", "temperature": 0.5,
                                                       "max_output_tokens": 64}}}
  })");
  EXPECT_EQ(c.configuration_name(""), "only");
  const RoleBinding& b = c.configuration("");
  EXPECT_EQ(b.at(AgentRole::Dispatcher).backend_id, "m");
  EXPECT_EQ(b.at(AgentRole::Referee).model, "small");
  EXPECT_EQ(b.at(AgentRole::Referee).temperature, 0.5);
  EXPECT_EQ(b.at(AgentRole::Referee).max_output_tokens, 64);
  EXPECT_EQ(c.policy, LoopPolicy{});
  EXPECT_FALSE(c.backends.at("m").script.at(0).usage.input_tokens.has_value());
  EXPECT_EQ(c.backends.at("m").script.at(0).usage.output_tokens, 0);
}

TEST(Config, RejectsBadConfigs) {
  EXPECT_THROW(cli::parse_config("{}"), ConfigError);
  EXPECT_THROW(cli::parse_config("not json"), ConfigError);
  EXPECT_THROW(cli::parse_config(R"({"backends": {"m": {"type": "magic"}}, "configurations": {"d": {"*": "m"}}})"),
               ConfigError);
  EXPECT_THROW(cli::parse_config(R"({"backends": {"m": {"type": "scripted", "script": [{"response": "x"}]}},
                                     "configurations": {"d": {"*": "ghost"}}})"),
               ConfigError);
  EXPECT_THROW(cli::parse_config(R"({"backends": {"m": {"type": "scripted", "script": [{"response": "x"}]}},
                                     "configurations": {"d": {"narrator": "m"}}})"),
               ConfigError);
}

TEST(Config, MissingKeyDetectedBeforeBuilding) {
  const cli::AppConfig c = cli::parse_config(R"({
    "backends": {"live": {"type": "openai", "base_url": "http://localhost:1/v1", "model": "x", "api_key_env": "K"}},
    "configurations": {"d": {"*": "live"}}
  })");
  const auto none = [](const std::string&) -> std::optional<std::string> { return std::nullopt; };
  EXPECT_THROW(cli::build_backends(c, {"live"}, none), ConfigError);
  const auto some = [](const std::string&) -> std::optional<std::string> { return "secret"; };
  const BackendRegistry reg = cli::build_backends(c, {"live"}, some);
  EXPECT_TRUE(reg.contains("live"));
  EXPECT_EQ(cli::backends_used(c.configuration("d")), (std::set<std::string>{"live"}));
}

}  // namespace
}  // namespace vreason
