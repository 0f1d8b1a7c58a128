#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace vreason {

using Bindings = std::map<std::string, std::string, std::less<>>;

// Placeholder names a template may reference.
inline constexpr std::string_view kKnownPlaceholders[] = {
    "question", "choices",   "memory",    "query",     "caption",
    "scene_graph", "candidate", "reference", "transcript"};

bool is_known_placeholder(std::string_view name);

// A template is literal text with `{name}` placeholders. `{{` and `}}` are
// literal braces. A brace not followed by a lowercase identifier and a
// closing brace is literal text, so JSON-ish examples survive untouched.
class PromptTemplate {
 public:
  // Throws UnknownPlaceholder if the text references a name outside
  // kKnownPlaceholders.
  PromptTemplate(std::string id, std::string text);

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }
  // Distinct names in order of first appearance.
  const std::vector<std::string>& placeholders() const { return placeholders_; }
  bool uses(std::string_view name) const;

 private:
  friend std::string render_prompt(const PromptTemplate&, const Bindings&);

  struct Segment {
    bool placeholder;
    std::string value;  // literal text or placeholder name
  };

  std::string id_;
  std::string text_;
  std::vector<Segment> segments_;
  std::vector<std::string> placeholders_;
};

// Single-pass substitution: bound values are inserted verbatim and never
// rescanned. Bindings the template does not reference are ignored. Throws
// MissingBinding naming the first unbound placeholder.
std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

// Template ids for every agent role and baseline stage.
namespace stage {
inline constexpr const char* kDispatcher = "dispatcher";
inline constexpr const char* kVisionExpert = "vision_expert";
inline constexpr const char* kInsightExpert = "insight_expert";
inline constexpr const char* kReferee = "referee";
inline constexpr const char* kSummarizer = "summarizer";
inline constexpr const char* kMergedExpert = "merged_expert";
inline constexpr const char* kMergedPerception = "merged_perception";
inline constexpr const char* kMergedAll = "merged_all";
inline constexpr const char* kDirect = "direct";
inline constexpr const char* kCot = "cot";
inline constexpr const char* kVdgdCaption = "vdgd_caption";
inline constexpr const char* kVdgdAnswer = "vdgd_answer";
inline constexpr const char* kCcotSceneGraph = "ccot_scene_graph";
inline constexpr const char* kCcotAnswer = "ccot_answer";
inline constexpr const char* kReactReason = "react_reason";
inline constexpr const char* kReactAct = "react_act";
inline constexpr const char* kReactFinal = "react_final";
inline constexpr const char* kJudgeCaption = "judge_caption";
inline constexpr const char* kJudgeReasoning = "judge_reasoning";
}  // namespace stage

// Immutable once built; share freely across threads.
class TemplateRegistry {
 public:
  // The built-in templates (shipped as core/templates/*.txt).
  static TemplateRegistry defaults();
  static const std::vector<std::string>& known_ids();

  // Loads `<id>.txt` files from `dir`, replacing the corresponding
  // templates. Other extensions are ignored; a `.txt` whose stem is not a
  // known id is a ConfigError.
  void load_directory(const std::filesystem::path& dir);

  void set(PromptTemplate tmpl);
  // Throws ConfigError for an unknown id.
  const PromptTemplate& get(std::string_view id) const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace vreason
