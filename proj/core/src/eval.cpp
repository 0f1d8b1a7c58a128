#include "vreason/eval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <spdlog/spdlog.h>

#include "text_util.hpp"
#include "vreason/errors.hpp"
#include "vreason/trace_io.hpp"

namespace vreason {

namespace {

using Key = std::pair<std::string, std::string>;  // (method, question id)

void require_role(const RoleBinding& bindings, const BackendRegistry& backends, AgentRole role,
                  bool needs_vision, const std::string& method) {
  const RoleTarget& t = bindings.at(role);
  const Backend& b = backends.get(t.backend_id);
  if (needs_vision && !b.vision_capable())
    throw ConfigError(method + ": role " + std::string(to_string(role)) + " is bound to '" +
                      t.backend_id + "', which cannot accept images");
}

}  // namespace

std::string MethodSpec::name() const {
  switch (kind) {
    case MethodKind::Direct: return "direct";
    case MethodKind::Cot: return "cot";
    case MethodKind::Vdgd: return "vdgd";
    case MethodKind::Ccot: return "ccot";
    case MethodKind::React: return "react";
    case MethodKind::ProReason: return proreason_method_name(merge);
  }
  return "proreason";
}

MethodSpec parse_method(std::string_view name) {
  const std::string n = detail::to_lower(detail::trim(name));
  if (n == "direct") return {MethodKind::Direct};
  if (n == "cot") return {MethodKind::Cot};
  if (n == "vdgd") return {MethodKind::Vdgd};
  if (n == "ccot") return {MethodKind::Ccot};
  if (n == "react") return {MethodKind::React};
  for (MergeConfig m : {MergeConfig::None, MergeConfig::VisionInsightMerged,
                        MergeConfig::PerceptionMerged, MergeConfig::AllMerged}) {
    if (n == proreason_method_name(m)) return {MethodKind::ProReason, m};
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

std::vector<MethodSpec> parse_method_list(std::string_view list) {
  std::vector<MethodSpec> out;
  auto add = [&out](MethodSpec m) {
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  };
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    const std::string_view item = detail::trim(list.substr(start, end - start));
    if (detail::iequals(item, "all")) {
      for (MethodKind k : {MethodKind::Direct, MethodKind::Cot, MethodKind::Vdgd, MethodKind::Ccot,
                           MethodKind::React, MethodKind::ProReason})
        add({k});
    } else if (!item.empty()) {
      add(parse_method(item));
    }
    start = end + 1;
  }
  if (out.empty()) throw InvalidArgument("no methods given");
  return out;
}

void validate_method_bindings(const MethodSpec& method, const RoleBinding& bindings,
                              const BackendRegistry& backends) {
  const std::string name = method.name();
  switch (method.kind) {
    case MethodKind::Direct:
    case MethodKind::Cot:
    case MethodKind::Vdgd:
    case MethodKind::Ccot:
      require_role(bindings, backends, AgentRole::VisionExpert, true, name);
      return;
    case MethodKind::React:
      require_role(bindings, backends, AgentRole::VisionExpert, true, name);
      require_role(bindings, backends, AgentRole::InsightExpert, false, name);
      return;
    case MethodKind::ProReason:
      bindings.validate(backends, method.merge);
      return;
  }
}

RunTrace run_method(const MethodSpec& method, const QuestionInstance& question,
                    const PipelineEnv& env, const RoleBinding& bindings, const LoopPolicy& policy,
                    CaptionCache* caption_cache) {
  switch (method.kind) {
    case MethodKind::Direct:
      return run_direct(question, env, bindings.at(AgentRole::VisionExpert));
    case MethodKind::Cot: return run_cot(question, env, bindings.at(AgentRole::VisionExpert));
    case MethodKind::Vdgd:
      return run_vdgd(question, env, bindings.at(AgentRole::VisionExpert), caption_cache);
    case MethodKind::Ccot: return run_ccot(question, env, bindings.at(AgentRole::VisionExpert));
    case MethodKind::React: return run_react(question, env, bindings, policy);
    case MethodKind::ProReason:
      return run_proreason(question, env, bindings, policy, method.merge);
  }
  throw InvalidArgument("unhandled method");
}

EvalOutcome run_evaluation(const std::vector<QuestionInstance>& questions, const PipelineEnv& env,
                           const RoleBinding& bindings, const EvalOptions& options) {
  if (options.methods.empty()) throw InvalidArgument("no methods to evaluate");
  options.policy.validate();
  for (const MethodSpec& m : options.methods) validate_method_bindings(m, bindings, env.backends);

  std::map<std::string, const QuestionInstance*> by_id;
  for (const QuestionInstance& q : questions) by_id[q.id] = &q;

  // Earlier traces: the ones this run would produce are reused, the rest
  // are carried over untouched.
  std::map<Key, RunTrace> done;
  std::vector<RunTrace> unrelated;
  const bool have_file = !options.trace_path.empty();
  if (have_file && options.resume && std::filesystem::exists(options.trace_path)) {
    std::set<std::string> wanted;
    for (const MethodSpec& m : options.methods) wanted.insert(m.name());
    for (RunTrace& t : read_trace_file(options.trace_path)) {
      if (wanted.count(t.method) && by_id.count(t.question_id))
        done.insert_or_assign({t.method, t.question_id}, std::move(t));
      else
        unrelated.push_back(std::move(t));
    }
  }

  struct Job {
    const MethodSpec* method;
    const QuestionInstance* question;
  };
  std::vector<Job> jobs;
  for (const MethodSpec& m : options.methods) {
    for (const QuestionInstance& q : questions) {
      if (!done.count({m.name(), q.id})) jobs.push_back({&m, &q});
    }
  }

  EvalOutcome outcome;
  outcome.resumed = done.size();

  std::ofstream sink;
  if (have_file) {
    if (!options.resume || !std::filesystem::exists(options.trace_path)) {
      sink.open(options.trace_path, std::ios::binary | std::ios::trunc);
    } else {
      sink.open(options.trace_path, std::ios::binary | std::ios::app);
    }
    if (!sink) throw IoError("cannot write traces to '" + options.trace_path.string() + "'");
  }

  CaptionCache cache;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      if (options.stop && options.stop->load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      const std::string method = job.method->name();
      try {
        RunTrace t = run_method(*job.method, *job.question, env, bindings, options.policy,
                                options.cache_captions ? &cache : nullptr);
        std::lock_guard lock(mu);
        if (sink.is_open()) {
          append_trace_line(sink, t);
          sink.flush();
        }
        ++outcome.executed;
        done.insert_or_assign({method, job.question->id}, std::move(t));
      } catch (const std::exception& e) {
        spdlog::error("{} on {} failed: {}", method, job.question->id, e.what());
        std::lock_guard lock(mu);
        outcome.failures.push_back({method, job.question->id, e.what()});
      }
    }
  };

  unsigned n_workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  n_workers = std::max(1u, std::min<unsigned>(n_workers, static_cast<unsigned>(jobs.size())));
  if (jobs.size() <= 1 || n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  outcome.interrupted = options.stop && options.stop->load() && next.load() < jobs.size();
  sink.close();

  for (const MethodSpec& m : options.methods) {
    for (const QuestionInstance& q : questions) {
      const auto it = done.find({m.name(), q.id});
      if (it == done.end()) continue;
      RunTrace& t = it->second;
      EvalRecord record = make_eval_record(t, q, options.numeric_epsilon);
      t.correct = record.correct;
      outcome.records.push_back(std::move(record));
      outcome.traces.push_back(std::move(t));
    }
  }
  // Failures in job order, so logs and exit summaries are stable.
  std::sort(outcome.failures.begin(), outcome.failures.end(),
            [](const EvalFailure& a, const EvalFailure& b) {
              return std::tie(a.method, a.question_id) < std::tie(b.method, b.question_id);
            });

  if (have_file) {
    std::vector<RunTrace> all = outcome.traces;
    all.insert(all.end(), unrelated.begin(), unrelated.end());
    write_trace_file(options.trace_path, all);
  }
  if (!outcome.records.empty()) outcome.report = score(outcome.records);
  return outcome;
}

}  // namespace vreason
