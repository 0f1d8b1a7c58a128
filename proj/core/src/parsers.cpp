#include "vreason/parsers.hpp"

#include <regex>

#include "text_util.hpp"
#include "vreason/errors.hpp"

namespace vreason {

namespace {

using detail::trim;

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

// Leading markdown a model likes to put in front of a label line.
std::string_view strip_line_decoration(std::string_view line) {
  line = trim(line);
  while (!line.empty() && (line.front() == '*' || line.front() == '#' || line.front() == '>' ||
                           line.front() == '-' || line.front() == '`' || line.front() == '_')) {
    line.remove_prefix(1);
  }
  return trim(line);
}

struct LabelLine {
  std::size_t index;
  std::string rest;  // text after "LABEL:" on the same line
};

// Finds lines of the form "<label>: rest", tolerating case, spacing and
// bold markers around the label.
std::vector<LabelLine> find_label_lines(const std::vector<std::string_view>& lines,
                                        const std::regex& label) {
  std::vector<LabelLine> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line(strip_line_decoration(lines[i]));
    std::smatch m;
    if (std::regex_search(line, m, label, std::regex_constants::match_continuous))
      out.push_back({i, m.suffix().str()});
  }
  return out;
}

std::string strip_value_decoration(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '*' || s.front() == '_' || s.front() == '`')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '*' || s.back() == '_' || s.back() == '`')) s.remove_suffix(1);
  return std::string(trim(s));
}

}  // namespace

Parsed<DispatchDecision> parse_dispatch(std::string_view raw) {
  const std::string_view text = trim(raw);
  if (text.empty()) throw EmptyResponse("dispatcher response is empty");

  static const std::regex kChoiceLabel(R"(choice\s*[*_]*\s*[:：])", kIcase);
  static const std::regex kQueryLabel(R"(query\s*[*_]*\s*[:：])", kIcase);
  static const std::regex kExpert(R"(^[\s*_`\[\("']*(vision|insight)\b)", kIcase);

  const auto lines = detail::split_lines(text);
  const auto choice_lines = find_label_lines(lines, kChoiceLabel);
  const auto query_lines = find_label_lines(lines, kQueryLabel);

  std::optional<ExpertKind> expert;
  bool ambiguous = false;
  for (const LabelLine& c : choice_lines) {
    std::smatch m;
    if (!std::regex_search(c.rest, m, kExpert)) {
      ambiguous = true;
      continue;
    }
    const ExpertKind k = expert_kind_from_string(m[1].str());
    if (expert && *expert != k) ambiguous = true;
    expert = k;
  }

  std::string query;
  if (!query_lines.empty()) {
    const LabelLine& q = query_lines.front();
    query = q.rest;
    for (std::size_t i = q.index + 1; i < lines.size(); ++i) {
      const bool is_choice = std::any_of(choice_lines.begin(), choice_lines.end(),
                                         [i](const LabelLine& c) { return c.index == i; });
      if (is_choice) break;
      query += '\n';
      query += lines[i];
    }
    query = strip_value_decoration(query);
  }

  Parsed<DispatchDecision> out;
  if (expert && !ambiguous && !query.empty()) {
    out.value = DispatchDecision{*expert, std::move(query)};
    return out;
  }
  out.fallback = true;
  out.value.expert = (expert && !ambiguous) ? *expert : ExpertKind::Vision;
  out.value.query = query.empty() ? std::string(text) : std::move(query);
  return out;
}

std::string format_dispatch(const DispatchDecision& decision) {
  return std::string("CHOICE: ") + (decision.expert == ExpertKind::Vision ? "VISION" : "INSIGHT") +
         "\nQUERY: " + decision.query;
}

Parsed<RefereeVerdict> parse_verdict(std::string_view raw) {
  if (trim(raw).empty()) throw EmptyResponse("referee response is empty");
  const std::string upper = detail::to_upper(raw);
  if (detail::contains(upper, "UNSOLVABLE")) return {RefereeVerdict::Unsolvable, false};
  if (detail::contains(upper, "SOLVABLE")) return {RefereeVerdict::Solvable, false};
  return {RefereeVerdict::Unsolvable, true};
}

ThinkSplit extract_think(std::string_view raw) {
  static constexpr std::string_view kOpen = "<think>";
  static constexpr std::string_view kClose = "</think>";
  const auto open = raw.find(kOpen);
  if (open == std::string_view::npos) return {std::nullopt, std::string(raw)};
  const auto close = raw.find(kClose, open + kOpen.size());
  if (close == std::string_view::npos) return {std::nullopt, std::string(raw)};
  ThinkSplit out;
  out.think = std::string(trim(raw.substr(open + kOpen.size(), close - open - kOpen.size())));
  std::string rest(trim(raw.substr(0, open)));
  const std::string_view after = trim(raw.substr(close + kClose.size()));
  if (!rest.empty() && !after.empty()) rest += '\n';
  rest += after;
  out.rest = std::move(rest);
  return out;
}

std::string extract_answer_block(std::string_view raw) {
  static const std::regex kAnswerLabel(R"((final\s+)?answer\s*[*_]*\s*[:：])", kIcase);
  const auto lines = detail::split_lines(raw);
  const auto found = find_label_lines(lines, kAnswerLabel);
  if (found.empty()) return std::string(trim(raw));
  const LabelLine& last = found.back();
  std::string block = last.rest;
  for (std::size_t i = last.index + 1; i < lines.size(); ++i) {
    block += '\n';
    block += lines[i];
  }
  block = strip_value_decoration(block);
  return block.empty() ? std::string(trim(raw)) : block;
}

ReactStep parse_react(std::string_view raw) {
  const std::string_view text = trim(raw);
  if (text.empty()) throw EmptyResponse("reasoning response is empty");
  static const std::regex kMarker(R"((act|action|final|final answer)\s*[*_]*\s*[:：])", kIcase);
  const auto lines = detail::split_lines(text);
  const auto found = find_label_lines(lines, kMarker);
  if (found.empty()) return {ReactStep::Kind::Act, std::string(text), true};

  const LabelLine& last = found.back();
  const std::string label = detail::to_lower(strip_line_decoration(lines[last.index]));
  ReactStep step;
  step.kind = label.rfind("final", 0) == 0 ? ReactStep::Kind::Final : ReactStep::Kind::Act;
  std::string body = last.rest;
  for (std::size_t i = last.index + 1; i < lines.size(); ++i) {
    body += '\n';
    body += lines[i];
  }
  step.text = strip_value_decoration(body);
  if (step.text.empty()) {
    step.text = std::string(text);
    step.fallback = true;
  }
  return step;
}

}  // namespace vreason
