#include "vreason/types.hpp"

#include <fstream>
#include <iterator>
#include <set>

#include "text_util.hpp"
#include "vreason/errors.hpp"

namespace vreason {

std::string_view to_string(AnswerKind kind) {
  switch (kind) {
    case AnswerKind::MultipleChoice: return "multiple_choice";
    case AnswerKind::YesNo: return "yes_no";
    case AnswerKind::Numeric: return "numeric";
    case AnswerKind::FreeText: return "free_text";
  }
  return "free_text";
}

AnswerKind answer_kind_from_string(std::string_view s) {
  const std::string k = detail::to_lower(detail::trim(s));
  if (k == "multiple_choice") return AnswerKind::MultipleChoice;
  if (k == "yes_no") return AnswerKind::YesNo;
  if (k == "numeric") return AnswerKind::Numeric;
  if (k == "free_text") return AnswerKind::FreeText;
  throw InvalidArgument("unknown answer kind '" + std::string(s) + "'");
}

ImageRef ImageRef::from_path(std::filesystem::path path) { return ImageRef(std::move(path)); }

ImageRef ImageRef::from_bytes(Bytes bytes) { return ImageRef(std::move(bytes)); }

ImageRef::Bytes ImageRef::load() const {
  if (!is_path()) return bytes();
  std::ifstream in(path(), std::ios::binary);
  if (!in) throw MissingImage("cannot read image '" + path().string() + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string ImageRef::describe() const {
  if (is_path()) return path().string();
  return "bytes:" + std::to_string(bytes().size());
}

void QuestionInstance::validate() const {
  if (id.empty()) throw InvalidArgument("question id is empty");
  if (answer_kind != AnswerKind::MultipleChoice) return;
  if (choices.empty()) throw InvalidArgument("question " + id + ": multiple choice without choices");
  std::set<std::string> labels;
  for (const Choice& c : choices) {
    if (c.label.empty()) throw InvalidArgument("question " + id + ": empty choice label");
    if (!labels.insert(c.label).second)
      throw InvalidArgument("question " + id + ": duplicate choice label '" + c.label + "'");
  }
  if (ground_truth && !labels.count(*ground_truth))
    throw InvalidArgument("question " + id + ": ground truth '" + *ground_truth +
                          "' is not a choice label");
}

std::string QuestionInstance::render_choices() const {
  std::string out;
  for (const Choice& c : choices) {
    if (!out.empty()) out += '\n';
    out += "(" + c.label + ") " + c.text;
  }
  return out;
}

std::string_view to_string(AgentRole role) {
  switch (role) {
    case AgentRole::Dispatcher: return "dispatcher";
    case AgentRole::VisionExpert: return "vision_expert";
    case AgentRole::InsightExpert: return "insight_expert";
    case AgentRole::Referee: return "referee";
    case AgentRole::Summarizer: return "summarizer";
  }
  return "dispatcher";
}

AgentRole agent_role_from_string(std::string_view s) {
  for (AgentRole r : kAllRoles) {
    if (detail::iequals(to_string(r), s)) return r;
  }
  throw InvalidArgument("unknown agent role '" + std::string(s) + "'");
}

std::string_view to_string(ExpertKind kind) {
  return kind == ExpertKind::Vision ? "vision" : "insight";
}

ExpertKind expert_kind_from_string(std::string_view s) {
  if (detail::iequals(s, "vision")) return ExpertKind::Vision;
  if (detail::iequals(s, "insight")) return ExpertKind::Insight;
  throw InvalidArgument("unknown expert kind '" + std::string(s) + "'");
}

std::string_view to_string(RefereeVerdict verdict) {
  return verdict == RefereeVerdict::Solvable ? "SOLVABLE" : "UNSOLVABLE";
}

void LoopPolicy::validate() const {
  if (max_steps_per_attempt < 1) throw InvalidArgument("max_steps_per_attempt must be >= 1");
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
}

}  // namespace vreason
