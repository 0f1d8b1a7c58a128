#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vreason/answer.hpp"
#include "vreason/orchestrator.hpp"

namespace vreason {

// A named ProReason configuration.
struct DistillConfig {
  std::string id;
  RoleBinding bindings;
  LoopPolicy policy;
  MergeConfig merge = MergeConfig::None;
};

struct SftMessage {
  std::string role;  // "user" or "assistant"
  std::string content;

  bool operator==(const SftMessage&) const = default;
};

// Conversation-format training example. The user turn holds one "<image>"
// token per image, then the question and its options; the assistant turn is
// the primary configuration's Summarizer output verbatim, think block
// included.
struct SftRecord {
  std::string question_id;
  std::vector<std::string> images;
  std::vector<SftMessage> messages;
  std::vector<std::string> source_configs;  // primary first
  std::string agreed_answer;

  bool operator==(const SftRecord&) const = default;
};

struct DistillOptions {
  bool parallel = false;  // run both configurations at once
  double numeric_epsilon = kDefaultNumericEpsilon;
};

struct DistillRun {
  std::optional<SftRecord> record;
  RunTrace primary;
  RunTrace secondary;
};

// Runs both configurations on `question` and keeps the primary's reasoning
// only if both extracted answers agree under the scoring comparison.
// Disagreements are logged. Backend failures propagate as BackendError.
DistillRun distill_pair(const QuestionInstance& question, const PipelineEnv& env,
                        const DistillConfig& primary, const DistillConfig& secondary,
                        const DistillOptions& options = {});

// The user-turn text for a question.
std::string sft_user_content(const QuestionInstance& question);

std::string sft_record_to_line(const SftRecord& record);
// Throws ParseError.
SftRecord sft_record_from_line(const std::string& line);

// One record per line, fixed field order. Duplicate question ids are
// written as given with a warning. Returns the number written. Throws
// IoError.
std::size_t export_sft(const std::vector<SftRecord>& records, const std::filesystem::path& path);

// Throws RecordFormatError with the one-based line number.
std::vector<SftRecord> read_sft_file(const std::filesystem::path& path);

}  // namespace vreason
