#include "vreason/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "json_util.hpp"
#include "vreason/errors.hpp"

namespace vreason {

namespace {

using detail::json;

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

double mean(std::int64_t sum, std::int64_t n) {
  return n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n);
}

std::string fixed(std::optional<double> v, int precision) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

// Integer fields in serialization order.
const std::vector<std::pair<const char*, std::int64_t EvalRow::*>>& counters() {
  static const std::vector<std::pair<const char*, std::int64_t EvalRow::*>> fields = {
      {"n", &EvalRow::n},
      {"scored", &EvalRow::scored},
      {"correct", &EvalRow::correct},
      {"input_tokens_sum", &EvalRow::input_tokens_sum},
      {"input_tokens_known", &EvalRow::input_tokens_known},
      {"output_tokens_sum", &EvalRow::output_tokens_sum},
      {"output_tokens_known", &EvalRow::output_tokens_known},
      {"wall_time_us_sum", &EvalRow::wall_time_us_sum},
      {"attempts_sum", &EvalRow::attempts_sum},
      {"iterations_sum", &EvalRow::iterations_sum},
      {"vision_calls_sum", &EvalRow::vision_calls_sum},
      {"insight_calls_sum", &EvalRow::insight_calls_sum},
  };
  return fields;
}

json optional_double(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

}  // namespace

EvalRecord make_eval_record(const RunTrace& trace, const QuestionInstance& question,
                            double relative_epsilon) {
  EvalRecord r;
  r.question_id = trace.question_id;
  r.dataset = trace.dataset.empty() ? question.dataset : trace.dataset;
  r.method = trace.method;
  r.extracted = trace.final.extracted;
  r.ground_truth = question.ground_truth;
  if (question.ground_truth)
    r.correct = answers_match(r.extracted, *question.ground_truth, question.answer_kind,
                              question.choices, relative_epsilon);
  r.usage = trace.total_usage;
  r.attempts = trace.attempts_used;
  r.iterations = trace.perception_steps();
  r.vision_calls = trace.count_role(AgentRole::VisionExpert);
  r.insight_calls = trace.count_role(AgentRole::InsightExpert);
  return r;
}

std::optional<double> EvalRow::accuracy() const {
  const auto r = ratio(correct, scored);
  if (!r) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(scored);
}

std::optional<double> EvalRow::mean_input_tokens() const {
  return ratio(input_tokens_sum, input_tokens_known);
}

std::optional<double> EvalRow::mean_output_tokens() const {
  return ratio(output_tokens_sum, output_tokens_known);
}

double EvalRow::mean_wall_time_s() const { return mean(wall_time_us_sum, n) / 1e6; }
double EvalRow::mean_iterations() const { return mean(iterations_sum, n); }
double EvalRow::mean_vision_calls() const { return mean(vision_calls_sum, n); }
double EvalRow::mean_insight_calls() const { return mean(insight_calls_sum, n); }

EvalReport score(std::span<const EvalRecord> records) {
  if (records.empty()) throw EmptyInput("score needs at least one record");
  std::map<std::pair<std::string, std::string>, EvalRow> groups;
  for (const EvalRecord& r : records) {
    if (r.correct.has_value() != r.ground_truth.has_value())
      throw InvalidArgument("record " + r.question_id + ": correct flag without ground truth");
    EvalRow& row = groups[{r.dataset, r.method}];
    if (row.n > 0 && (row.scored > 0) != r.ground_truth.has_value())
      throw InvalidArgument("dataset '" + r.dataset + "', method '" + r.method +
                            "' mixes records with and without ground truth");
    row.dataset = r.dataset;
    row.method = r.method;
    ++row.n;
    if (r.correct) {
      ++row.scored;
      if (*r.correct) ++row.correct;
    }
    if (r.usage.input_tokens) {
      row.input_tokens_sum += *r.usage.input_tokens;
      ++row.input_tokens_known;
    }
    if (r.usage.output_tokens) {
      row.output_tokens_sum += *r.usage.output_tokens;
      ++row.output_tokens_known;
    }
    row.wall_time_us_sum += r.usage.wall_time.count();
    row.attempts_sum += r.attempts;
    row.iterations_sum += r.iterations;
    row.vision_calls_sum += r.vision_calls;
    row.insight_calls_sum += r.insight_calls;
  }
  EvalReport report;
  for (auto& [key, row] : groups) report.rows.push_back(std::move(row));
  return report;
}

std::string report_render_table(const EvalReport& report) {
  const std::vector<std::string> header = {"dataset", "method",  "n",    "acc%",   "in_tok",
                                           "out_tok", "time_s", "iters", "vision", "insight"};
  std::vector<std::vector<std::string>> cells;
  for (const EvalRow& r : report.rows) {
    cells.push_back({r.dataset, r.method, std::to_string(r.n), fixed(r.accuracy(), 1),
                     fixed(r.mean_input_tokens(), 1), fixed(r.mean_output_tokens(), 1),
                     fixed(r.mean_wall_time_s(), 2), fixed(r.mean_iterations(), 2),
                     fixed(r.mean_vision_calls(), 2), fixed(r.mean_insight_calls(), 2)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << "  ";
      // Text columns left-aligned, numbers right-aligned.
      if (c < 2)
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      else
        out << std::string(width[c] - row[c].size(), ' ') << row[c];
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : cells) emit(row);
  return out.str();
}

std::string report_to_json(const EvalReport& report) {
  json rows = json::array();
  for (const EvalRow& r : report.rows) {
    json row{{"dataset", r.dataset}, {"method", r.method}};
    for (const auto& [name, field] : counters()) row[name] = r.*field;
    // Derived values, for readers that do not want to divide.
    row["accuracy"] = optional_double(r.accuracy());
    row["mean_input_tokens"] = optional_double(r.mean_input_tokens());
    row["mean_output_tokens"] = optional_double(r.mean_output_tokens());
    row["mean_wall_time_s"] = r.mean_wall_time_s();
    row["mean_iterations"] = r.mean_iterations();
    row["mean_vision_calls"] = r.mean_vision_calls();
    row["mean_insight_calls"] = r.mean_insight_calls();
    rows.push_back(std::move(row));
  }
  return json{{"rows", std::move(rows)}}.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    EvalReport report;
    for (const json& row : j.at("rows")) {
      EvalRow r;
      r.dataset = row.at("dataset").get<std::string>();
      r.method = row.at("method").get<std::string>();
      for (const auto& [name, field] : counters()) r.*field = row.at(name).get<std::int64_t>();
      report.rows.push_back(std::move(r));
    }
    return report;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
}

void write_report_file(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report '" + path.string() + "'");
  out << report_to_json(report);
  if (!out) throw IoError("failed writing report '" + path.string() + "'");
}

EvalReport read_report_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace vreason
