#include "vreason/trace_io.hpp"

#include <fstream>
#include <ostream>

#include "json_util.hpp"
#include "text_util.hpp"
#include "vreason/errors.hpp"

namespace vreason {

namespace {

using detail::json;

json final_to_json(const FinalAnswer& f) {
  return json{{"reasoning", f.reasoning},
              {"think", detail::optional_to_json(f.think)},
              {"extracted", detail::optional_to_json(f.extracted)}};
}

FinalAnswer final_from_json(const json& j) {
  FinalAnswer f;
  f.reasoning = j.at("reasoning").get<std::string>();
  f.think = detail::optional_string(j, "think");
  f.extracted = detail::optional_string(j, "extracted");
  return f;
}

json parsed_to_json(const ParsedOutput& p) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DispatchDecision>) {
          return json{{"kind", "dispatch"}, {"expert", to_string(v.expert)}, {"query", v.query}};
        } else if constexpr (std::is_same_v<T, ExpertAnswer>) {
          return json{{"kind", "expert_answer"}, {"text", v.text}};
        } else if constexpr (std::is_same_v<T, RefereeVerdict>) {
          return json{{"kind", "verdict"}, {"verdict", to_string(v)}};
        } else {
          json j = final_to_json(v);
          j["kind"] = "final";
          return j;
        }
      },
      p);
}

ParsedOutput parsed_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "dispatch") {
    return DispatchDecision{expert_kind_from_string(j.at("expert").get<std::string>()),
                            j.at("query").get<std::string>()};
  }
  if (kind == "expert_answer") return ExpertAnswer{j.at("text").get<std::string>()};
  if (kind == "verdict") {
    const auto v = j.at("verdict").get<std::string>();
    if (v == "SOLVABLE") return RefereeVerdict::Solvable;
    if (v == "UNSOLVABLE") return RefereeVerdict::Unsolvable;
    throw InvalidArgument("unknown verdict '" + v + "'");
  }
  if (kind == "final") return final_from_json(j);
  throw InvalidArgument("unknown parsed kind '" + kind + "'");
}

json step_to_json(const StepRecord& s) {
  return json{{"role", to_string(s.role)},
              {"stage", s.stage},
              {"attempt", s.attempt},
              {"step", s.step},
              {"prompt", s.prompt},
              {"raw_response", s.raw_response},
              {"parsed", parsed_to_json(s.parsed)},
              {"usage", detail::usage_to_json(s.usage)},
              {"image_count", s.image_count},
              {"parse_fallback", s.parse_fallback},
              {"cached", s.cached}};
}

StepRecord step_from_json(const json& j) {
  StepRecord s;
  s.role = agent_role_from_string(j.at("role").get<std::string>());
  s.stage = j.at("stage").get<std::string>();
  s.attempt = j.at("attempt").get<int>();
  s.step = j.at("step").get<int>();
  s.prompt = j.at("prompt").get<std::string>();
  s.raw_response = j.at("raw_response").get<std::string>();
  s.parsed = parsed_from_json(j.at("parsed"));
  s.usage = detail::usage_from_json(j.at("usage"));
  s.image_count = j.value("image_count", 0);
  s.parse_fallback = j.value("parse_fallback", false);
  s.cached = j.value("cached", false);
  return s;
}

}  // namespace

std::string trace_to_line(const RunTrace& t) {
  json steps = json::array();
  for (const StepRecord& s : t.steps) steps.push_back(step_to_json(s));
  json j{{"question_id", t.question_id},
         {"dataset", t.dataset},
         {"method", t.method},
         {"steps", std::move(steps)},
         {"final", final_to_json(t.final)},
         {"total_usage", detail::usage_to_json(t.total_usage)},
         {"attempts_used", t.attempts_used},
         {"steps_used_last_attempt", t.steps_used_last_attempt},
         {"memory_clears", t.memory_clears},
         {"correct", t.correct ? json(*t.correct) : json(nullptr)}};
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

RunTrace trace_from_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    RunTrace t;
    t.question_id = j.at("question_id").get<std::string>();
    t.dataset = j.value("dataset", "");
    t.method = j.at("method").get<std::string>();
    for (const json& s : j.at("steps")) t.steps.push_back(step_from_json(s));
    t.final = final_from_json(j.at("final"));
    t.total_usage = detail::usage_from_json(j.at("total_usage"));
    t.attempts_used = j.at("attempts_used").get<int>();
    t.steps_used_last_attempt = j.at("steps_used_last_attempt").get<int>();
    t.memory_clears = j.at("memory_clears").get<int>();
    if (j.contains("correct") && !j.at("correct").is_null()) t.correct = j.at("correct").get<bool>();
    return t;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed trace record: ") + e.what());
  }
}

std::vector<RunTrace> read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file '" + path.string() + "'");
  std::vector<RunTrace> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      traces.push_back(trace_from_line(line));
    } catch (const Error& e) {
      throw RecordFormatError(line_no, e.what());
    }
  }
  return traces;
}

void append_trace_line(std::ostream& out, const RunTrace& trace) {
  out << trace_to_line(trace) << '\n';
}

void write_trace_file(const std::filesystem::path& path, const std::vector<RunTrace>& traces) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write trace file '" + path.string() + "'");
  for (const RunTrace& t : traces) append_trace_line(out, t);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace vreason
