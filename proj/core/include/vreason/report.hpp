#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vreason/answer.hpp"
#include "vreason/trace.hpp"
#include "vreason/types.hpp"
#include "vreason/usage.hpp"

namespace vreason {

// One scored run.
struct EvalRecord {
  std::string question_id;
  std::string dataset;
  std::string method;
  std::optional<std::string> extracted;
  std::optional<std::string> ground_truth;
  std::optional<bool> correct;  // set exactly when ground_truth is
  UsageStats usage;
  int attempts = 0;
  int iterations = 0;  // perception steps over all attempts
  int vision_calls = 0;
  int insight_calls = 0;

  bool operator==(const EvalRecord&) const = default;
};

// Scores `trace` against `question`. A missing extraction counts as wrong.
EvalRecord make_eval_record(const RunTrace& trace, const QuestionInstance& question,
                            double relative_epsilon = kDefaultNumericEpsilon);

// Aggregate for one (dataset, method). Everything is kept as integer sums
// so the means are exact ratios.
struct EvalRow {
  std::string dataset;
  std::string method;
  std::int64_t n = 0;
  std::int64_t scored = 0;  // records with ground truth
  std::int64_t correct = 0;
  std::int64_t input_tokens_sum = 0;
  std::int64_t input_tokens_known = 0;
  std::int64_t output_tokens_sum = 0;
  std::int64_t output_tokens_known = 0;
  std::int64_t wall_time_us_sum = 0;
  std::int64_t attempts_sum = 0;
  std::int64_t iterations_sum = 0;
  std::int64_t vision_calls_sum = 0;
  std::int64_t insight_calls_sum = 0;

  // 100 * correct / scored; nullopt when nothing was scorable.
  std::optional<double> accuracy() const;
  // Means over records whose count is known; nullopt if none is.
  std::optional<double> mean_input_tokens() const;
  std::optional<double> mean_output_tokens() const;
  double mean_wall_time_s() const;
  double mean_iterations() const;
  double mean_vision_calls() const;
  double mean_insight_calls() const;

  bool operator==(const EvalRow&) const = default;
};

struct EvalReport {
  std::vector<EvalRow> rows;  // sorted by (dataset, method)

  bool operator==(const EvalReport&) const = default;
};

// Groups records by (dataset, method). Throws EmptyInput for no records and
// InvalidArgument when a group mixes records with and without ground truth.
EvalReport score(std::span<const EvalRecord> records);

// Fixed-width text table, one row per (dataset, method).
std::string report_render_table(const EvalReport& report);

std::string report_to_json(const EvalReport& report);
// Throws ParseError on malformed input.
EvalReport report_from_json(const std::string& text);

void write_report_file(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report_file(const std::filesystem::path& path);

}  // namespace vreason
