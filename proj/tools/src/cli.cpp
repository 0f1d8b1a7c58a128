#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <vreason/dataset.hpp>
#include <vreason/distill.hpp>
#include <vreason/errors.hpp>
#include <vreason/eval.hpp>
#include <vreason/judge.hpp>
#include <vreason/trace_io.hpp>

#include "config.hpp"

namespace vreason::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Failure detected before any model call: reported with exit status 2.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalArgs {
  std::string config;
  std::string dataset;
  std::string images;
  std::string methods = "all";
  std::string binding;
  std::optional<int> max_attempts;
  std::optional<int> max_steps;
  std::optional<unsigned> workers;
  std::string out = "out";
  std::string templates;
  bool no_resume = false;
};

struct JudgeArgs {
  std::string config;
  std::string traces;
  std::string references;
  std::string rubric = "reasoning";
  std::string method;
  std::string out = "judge_scores.jsonl";
};

struct DistillArgs {
  std::string config;
  std::string dataset;
  std::string images;
  std::string config_a;
  std::string config_b;
  std::string out = "sft.jsonl";
  std::string templates;
  bool parallel = false;
};

template <class F>
auto before_run(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }
}

TemplateRegistry load_templates(const AppConfig& config, const std::string& override_dir) {
  TemplateRegistry templates = TemplateRegistry::defaults();
  if (!override_dir.empty())
    templates.load_directory(override_dir);
  else if (config.templates_dir)
    templates.load_directory(*config.templates_dir);
  return templates;
}

DatasetOptions dataset_options(const std::string& images) {
  DatasetOptions o;
  if (!images.empty()) o.image_root = images;
  return o;
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  const AppConfig config = before_run([&] { return load_config(args.config); });
  const std::vector<MethodSpec> methods = before_run([&] { return parse_method_list(args.methods); });
  const std::string binding_name = before_run([&] { return config.configuration_name(args.binding); });
  const RoleBinding& binding = config.configurations.at(binding_name);

  LoopPolicy policy = config.policy;
  if (args.max_attempts) policy.max_attempts = *args.max_attempts;
  if (args.max_steps) policy.max_steps_per_attempt = *args.max_steps;
  before_run([&] { policy.validate(); });

  const TemplateRegistry templates = before_run([&] { return load_templates(config, args.templates); });
  const auto questions =
      before_run([&] { return load_dataset(args.dataset, dataset_options(args.images)); });
  if (questions.empty()) throw UsageFailure("dataset '" + args.dataset + "' has no records");
  const BackendRegistry backends =
      before_run([&] { return build_backends(config, backends_used(binding)); });
  before_run([&] {
    for (const MethodSpec& m : methods) validate_method_bindings(m, binding, backends);
  });

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);
  EvalOptions options;
  options.methods = methods;
  options.policy = policy;
  options.workers = args.workers.value_or(config.workers);
  options.numeric_epsilon = config.numeric_epsilon;
  options.trace_path = out_dir / "traces.jsonl";
  options.resume = !args.no_resume;
  options.stop = &stop_flag();

  const PipelineEnv env{templates, backends};
  const EvalOutcome outcome = run_evaluation(questions, env, binding, options);

  if (outcome.report) {
    out << report_render_table(*outcome.report);
    write_report_file(out_dir / "report.json", *outcome.report);
  }
  out << "configuration " << binding_name << ": " << outcome.executed << " run, "
      << outcome.resumed << " resumed, " << outcome.failures.size() << " failed\n";
  for (const EvalFailure& f : outcome.failures)
    err << "failed: " << f.method << " " << f.question_id << ": " << f.message << "\n";
  if (outcome.interrupted) err << "interrupted; partial results written\n";
  return outcome.failures.empty() && !outcome.interrupted ? kExitOk : kExitFailure;
}

struct Reference {
  std::string reference;
  std::string question;
};

std::map<std::string, Reference> read_references(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open references '" + path.string() + "'");
  std::map<std::string, Reference> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      Reference r;
      r.reference = j.at("reference").get<std::string>();
      r.question = j.value("question", "");
      out[j.at("question_id").get<std::string>()] = std::move(r);
    } catch (const json::exception& e) {
      throw RecordFormatError(n, std::string("malformed reference: ") + e.what());
    }
  }
  return out;
}

// The caption a trace produced: the VDGD caption stage, else the first
// image-seeing step.
std::optional<std::string> caption_of(const RunTrace& t) {
  for (const StepRecord& s : t.steps)
    if (s.stage == stage::kVdgdCaption) return s.raw_response;
  for (const StepRecord& s : t.steps)
    if (s.role == AgentRole::VisionExpert) return s.raw_response;
  return std::nullopt;
}

int cmd_judge(const JudgeArgs& args, std::ostream& out, std::ostream& err) {
  if (args.rubric != "reasoning" && args.rubric != "caption")
    throw UsageFailure("--rubric must be reasoning or caption");
  const AppConfig config = before_run([&] { return load_config(args.config); });
  if (!config.judge) throw UsageFailure("config has no 'judge' binding");
  std::vector<RunTrace> traces = before_run([&] { return read_trace_file(args.traces); });
  if (!args.method.empty())
    std::erase_if(traces, [&](const RunTrace& t) { return t.method != args.method; });
  if (traces.empty()) throw UsageFailure("no traces to judge in '" + args.traces + "'");
  const auto references = before_run([&] { return read_references(args.references); });
  const TemplateRegistry templates = before_run([&] { return load_templates(config, ""); });
  const BackendRegistry backends =
      before_run([&] { return build_backends(config, {config.judge->backend_id}); });
  const PipelineEnv env{templates, backends};

  const fs::path out_path(args.out);
  ensure_parent(out_path);
  std::ofstream sink(out_path, std::ios::binary | std::ios::trunc);
  if (!sink) throw UsageFailure("cannot write '" + out_path.string() + "'");

  std::vector<JudgedItem> items;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  const std::array<const char*, 3> names =
      args.rubric == "caption" ? std::array<const char*, 3>{"detail", "relevance", "effective_info"}
                               : std::array<const char*, 3>{"RE", "RI", "MI"};
  for (const RunTrace& t : traces) {
    if (stop_flag().load()) break;
    const auto ref = references.find(t.question_id);
    if (ref == references.end()) {
      err << "no reference for " << t.question_id << "; skipped\n";
      ++skipped;
      continue;
    }
    std::array<int, 3> scores{};
    try {
      if (args.rubric == "caption") {
        const auto caption = caption_of(t);
        if (!caption) {
          err << t.method << " " << t.question_id << " has no caption; skipped\n";
          ++skipped;
          continue;
        }
        scores = judge_caption(*caption, ref->second.question, ref->second.reference, env,
                               *config.judge)
                     .as_array();
      } else {
        scores = judge_reasoning(t.final.reasoning, ref->second.reference, env, *config.judge)
                     .as_array();
      }
    } catch (const Error& e) {
      err << "judge failed on " << t.method << " " << t.question_id << ": " << e.what() << "\n";
      ++failed;
      continue;
    }
    json record{{"question_id", t.question_id},
                {"method", t.method},
                {"rubric", args.rubric},
                {"correct", t.correct ? json(*t.correct) : json(nullptr)}};
    for (std::size_t i = 0; i < 3; ++i) record["scores"][names[i]] = scores[i];
    sink << record.dump() << '\n';
    if (t.correct) items.push_back({scores, *t.correct});
  }
  sink.close();

  if (!items.empty()) {
    const auto agg = judge_aggregate(items);
    out << "correct  n     " << names[0] << "  " << names[1] << "  " << names[2] << "\n";
    for (const auto& [flag, group] : agg) {
      char line[128];
      std::snprintf(line, sizeof line, "%-7s  %-4zu  %.2f  %.2f  %.2f\n", flag ? "True" : "False",
                    group.count, group.means[0], group.means[1], group.means[2]);
      out << line;
    }
  }
  out << "judged " << (traces.size() - failed - skipped) << ", skipped " << skipped << ", failed "
      << failed << "\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_distill(const DistillArgs& args, std::ostream& out, std::ostream& err) {
  const AppConfig config = before_run([&] { return load_config(args.config); });
  if (args.config_a == args.config_b)
    err << "warning: --config-a and --config-b are both '" << args.config_a
        << "'; every question will agree with itself\n";
  DistillConfig a;
  DistillConfig b;
  before_run([&] {
    a = {args.config_a, config.configuration(args.config_a), config.policy, MergeConfig::None};
    b = {args.config_b, config.configuration(args.config_b), config.policy, MergeConfig::None};
  });
  const TemplateRegistry templates = before_run([&] { return load_templates(config, args.templates); });
  const auto questions =
      before_run([&] { return load_dataset(args.dataset, dataset_options(args.images)); });
  if (questions.empty()) throw UsageFailure("dataset '" + args.dataset + "' has no records");
  std::set<std::string> ids = backends_used(a.bindings);
  ids.merge(backends_used(b.bindings));
  const BackendRegistry backends = before_run([&] { return build_backends(config, ids); });
  before_run([&] {
    a.bindings.validate(backends);
    b.bindings.validate(backends);
  });

  const PipelineEnv env{templates, backends};
  DistillOptions options;
  options.parallel = args.parallel;
  options.numeric_epsilon = config.numeric_epsilon;

  std::vector<SftRecord> records;
  std::size_t disagreed = 0;
  std::size_t failed = 0;
  for (const QuestionInstance& q : questions) {
    if (stop_flag().load()) break;
    try {
      DistillRun run = distill_pair(q, env, a, b, options);
      if (run.record)
        records.push_back(std::move(*run.record));
      else
        ++disagreed;
    } catch (const Error& e) {
      err << "distill failed on " << q.id << ": " << e.what() << "\n";
      ++failed;
    }
  }
  const fs::path out_path(args.out);
  ensure_parent(out_path);
  const std::size_t written = export_sft(records, out_path);
  out << questions.size() << " questions: " << written << " agreed, " << disagreed
      << " disagreed, " << failed << " failed; wrote " << out_path.string() << "\n";
  return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decoupled visual reasoning: evaluation, judging and distillation"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Run methods over a dataset and score them");
  eval_cmd->add_option("--config", eval.config, "Config file")->required();
  eval_cmd->add_option("--dataset", eval.dataset, "Dataset JSONL file")->required();
  eval_cmd->add_option("--images", eval.images, "Image root (default: dataset directory)");
  eval_cmd->add_option("--methods", eval.methods,
                       "Comma-separated: direct,cot,vdgd,ccot,react,proreason[+merge_vi|"
                       "+merge_perception|+merge_all], or all");
  eval_cmd->add_option("--binding", eval.binding, "Named configuration of role bindings");
  eval_cmd->add_option("--max-attempts", eval.max_attempts, "Perception attempts per question");
  eval_cmd->add_option("--max-steps", eval.max_steps, "Perception steps per attempt");
  eval_cmd->add_option("--workers", eval.workers, "Questions evaluated concurrently");
  eval_cmd->add_option("--out", eval.out, "Output directory for traces.jsonl and report.json");
  eval_cmd->add_option("--templates", eval.templates, "Directory of template overrides");
  eval_cmd->add_flag("--no-resume", eval.no_resume, "Ignore traces already in the output");

  JudgeArgs judge;
  auto* judge_cmd = app.add_subcommand("judge", "Score traces with an LLM judge");
  judge_cmd->add_option("--config", judge.config, "Config file")->required();
  judge_cmd->add_option("--traces", judge.traces, "Trace file from eval")->required();
  judge_cmd->add_option("--references", judge.references,
                        "JSONL of {question_id, reference, question}")
      ->required();
  judge_cmd->add_option("--rubric", judge.rubric, "reasoning or caption");
  judge_cmd->add_option("--method", judge.method, "Only judge traces of this method");
  judge_cmd->add_option("--out", judge.out, "Score records file");

  DistillArgs distill;
  auto* distill_cmd = app.add_subcommand("distill", "Export agreement-filtered SFT data");
  distill_cmd->add_option("--config", distill.config, "Config file")->required();
  distill_cmd->add_option("--dataset", distill.dataset, "Dataset JSONL file")->required();
  distill_cmd->add_option("--images", distill.images, "Image root (default: dataset directory)");
  distill_cmd->add_option("--config-a", distill.config_a, "Primary configuration")->required();
  distill_cmd->add_option("--config-b", distill.config_b, "Checking configuration")->required();
  distill_cmd->add_option("--out", distill.out, "Output JSONL file");
  distill_cmd->add_option("--templates", distill.templates, "Directory of template overrides");
  distill_cmd->add_flag("--parallel", distill.parallel, "Run both configurations concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*eval_cmd) return cmd_eval(eval, out, err);
    if (*judge_cmd) return cmd_judge(judge, out, err);
    if (*distill_cmd) return cmd_distill(distill, out, err);
  } catch (const UsageFailure& e) {
    err << "error: " << e.what() << "\n";
    if (*eval_cmd && std::string_view(e.what()).find("unknown method") != std::string_view::npos)
      err << eval_cmd->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace vreason::cli
