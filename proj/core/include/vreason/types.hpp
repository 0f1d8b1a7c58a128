#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vreason {

enum class AnswerKind { MultipleChoice, YesNo, Numeric, FreeText };

std::string_view to_string(AnswerKind kind);
AnswerKind answer_kind_from_string(std::string_view s);

struct Choice {
  std::string label;
  std::string text;

  bool operator==(const Choice&) const = default;
};

// Opaque image handle. Either a file on disk or an in-memory encoded image
// (PNG/JPEG/...). The engine never decodes pixels.
class ImageRef {
 public:
  using Bytes = std::vector<std::uint8_t>;

  static ImageRef from_path(std::filesystem::path path);
  static ImageRef from_bytes(Bytes bytes);

  bool is_path() const { return std::holds_alternative<std::filesystem::path>(source_); }
  const std::filesystem::path& path() const { return std::get<std::filesystem::path>(source_); }
  const Bytes& bytes() const { return std::get<Bytes>(source_); }

  // Reads the file (or copies the buffer). Throws MissingImage if the file
  // cannot be read.
  Bytes load() const;

  // Path string for file images, "bytes:<size>" otherwise.
  std::string describe() const;

  bool operator==(const ImageRef&) const = default;

 private:
  explicit ImageRef(std::variant<std::filesystem::path, Bytes> source)
      : source_(std::move(source)) {}

  std::variant<std::filesystem::path, Bytes> source_;
};

// One benchmark item.
struct QuestionInstance {
  std::string id;
  std::string dataset;
  std::vector<ImageRef> images;
  std::string question;
  std::vector<Choice> choices;  // empty unless multiple choice
  std::optional<std::string> ground_truth;
  AnswerKind answer_kind = AnswerKind::FreeText;

  // Throws InvalidArgument when the multiple-choice invariants are broken
  // (no choices, duplicate labels, ground truth not among the labels).
  void validate() const;

  // "(A) text" lines, or the empty string when there are no choices.
  std::string render_choices() const;
};

enum class AgentRole { Dispatcher, VisionExpert, InsightExpert, Referee, Summarizer };

inline constexpr AgentRole kAllRoles[] = {AgentRole::Dispatcher, AgentRole::VisionExpert,
                                          AgentRole::InsightExpert, AgentRole::Referee,
                                          AgentRole::Summarizer};

std::string_view to_string(AgentRole role);
AgentRole agent_role_from_string(std::string_view s);

enum class ExpertKind { Vision, Insight };

std::string_view to_string(ExpertKind kind);
ExpertKind expert_kind_from_string(std::string_view s);

struct DispatchDecision {
  ExpertKind expert = ExpertKind::Vision;
  std::string query;

  bool operator==(const DispatchDecision&) const = default;
};

enum class RefereeVerdict { Solvable, Unsolvable };

std::string_view to_string(RefereeVerdict verdict);

struct LoopPolicy {
  int max_steps_per_attempt = 5;
  int max_attempts = 5;

  void validate() const;
  bool operator==(const LoopPolicy&) const = default;
};

}  // namespace vreason
