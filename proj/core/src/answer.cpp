#include "vreason/answer.hpp"

#include <cmath>
#include <regex>

#include "text_util.hpp"
#include "vreason/parsers.hpp"

namespace vreason {

namespace {

using detail::trim;

constexpr auto kIcase = std::regex::ECMAScript | std::regex::icase;

const std::regex& number_regex() {
  static const std::regex re(R"([-+]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|[-+]?\.\d+)");
  return re;
}

std::string escape_regex(std::string_view s) {
  static const std::string kSpecial = R"(\^$.|?*+()[]{}/-)";
  std::string out;
  for (char c : s) {
    if (kSpecial.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

std::string label_alternation(const std::vector<Choice>& choices) {
  std::string alt;
  for (const Choice& c : choices) {
    if (!alt.empty()) alt += '|';
    alt += escape_regex(c.label);
  }
  return alt;
}

std::optional<std::string> find_label(std::string_view token, const std::vector<Choice>& choices) {
  for (const Choice& c : choices) {
    if (detail::iequals(c.label, token)) return c.label;
  }
  return std::nullopt;
}

std::string strip_punctuation_edges(std::string_view s) {
  auto is_edge = [](char c) {
    return detail::is_space(c) || c == '(' || c == ')' || c == '[' || c == ']' || c == '.' ||
           c == '*' || c == ':' || c == '_' || c == '`' || c == '"' || c == '\'' || c == ',';
  };
  while (!s.empty() && is_edge(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_edge(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::optional<std::string> normalize_choice(std::string_view candidate,
                                            const std::vector<Choice>& choices) {
  if (choices.empty()) return std::nullopt;
  const std::string bare = strip_punctuation_edges(candidate);
  if (auto label = find_label(bare, choices)) return label;

  const std::string alt = label_alternation(choices);
  // "B. text", "(B) text", "B) text", "B: text"
  const std::regex leading(R"(^[\s(\[*_]*()" + alt + R"()(?:[)\].:,*]|\s|$))", kIcase);
  std::smatch m;
  const std::string cand(trim(candidate));
  if (std::regex_search(cand, m, leading)) return find_label(m[1].str(), choices);

  const std::string text = normalize_free_text(bare);
  for (const Choice& c : choices) {
    if (!c.text.empty() && normalize_free_text(c.text) == text) return c.label;
  }
  const std::regex paren(R"(\(\s*()" + alt + R"()\s*\))", kIcase);
  std::optional<std::string> last;
  for (auto it = std::sregex_iterator(cand.begin(), cand.end(), paren); it != std::sregex_iterator(); ++it)
    last = find_label((*it)[1].str(), choices);
  return last;
}

std::optional<std::string> first_yes_no(std::string_view s, bool last) {
  static const std::regex re(R"(\b(yes|no)\b)", kIcase);
  const std::string str(s);
  std::optional<std::string> found;
  for (auto it = std::sregex_iterator(str.begin(), str.end(), re); it != std::sregex_iterator(); ++it) {
    found = detail::to_lower((*it)[1].str());
    if (!last) break;
  }
  return found;
}

std::optional<std::string> pick_number(std::string_view s, bool last) {
  const std::string str(s);
  std::optional<std::string> found;
  for (auto it = std::sregex_iterator(str.begin(), str.end(), number_regex());
       it != std::sregex_iterator(); ++it) {
    found = canonical_number(it->str());
    if (!last) break;
  }
  return found;
}

// Text after the last "Answer:" label, or after a bare label line the
// following non-empty line.
std::optional<std::string> last_answer_line(std::string_view raw) {
  static const std::regex label(
      R"(^[\s*#>_`-]*(?:the\s+)?(?:final\s+)?answer(?:\s+is)?\s*[*_]*\s*[:：]\s*[*_]*\s*)", kIcase);
  const auto lines = detail::split_lines(raw);
  for (std::size_t i = lines.size(); i-- > 0;) {
    const std::string line(lines[i]);
    std::smatch m;
    if (!std::regex_search(line, m, label)) continue;
    std::string rest(trim(m.suffix().str()));
    if (rest.empty()) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        if (!trim(lines[j]).empty()) {
          rest = std::string(trim(lines[j]));
          break;
        }
      }
    }
    if (!rest.empty()) return rest;
  }
  return std::nullopt;
}

std::optional<std::string> last_standalone_label(std::string_view raw,
                                                 const std::vector<Choice>& choices) {
  if (choices.empty()) return std::nullopt;
  const std::string text(raw);
  const std::string alt = label_alternation(choices);
  struct Hit {
    std::ptrdiff_t pos;
    std::string label;
  };
  std::optional<Hit> best;
  auto scan = [&](const std::regex& re) {
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
      const auto pos = it->position(1);
      if (!best || pos >= best->pos) best = Hit{pos, (*it)[1].str()};
    }
  };
  // (B)
  scan(std::regex(R"(\(\s*()" + alt + R"()\s*\))", kIcase));
  // "answer is B", "option B"
  scan(std::regex(R"((?:answer\s+is|answer\s*[:：]|option|choice)\s*[*_]*\s*\(?()" + alt +
                      R"()\b)",
                  kIcase));
  // B. / B) followed by whitespace or end, not glued to a word.
  scan(std::regex(R"((?:^|[\s*_"'\[])()" + alt + R"()[.)](?=\s|$|\*))"));
  // A line holding nothing but the label.
  scan(std::regex(R"((?:^|\n)[\s*_(\[]*()" + alt + R"()[\s*_)\].]*(?=\n|$))", kIcase));
  // "thus B", "so C" and a bare label closing the text. Case-sensitive, so
  // the article "a" does not pass for option A.
  scan(std::regex(R"((?:^|[^A-Za-z])(?:[Tt]hus|[Ss]o|[Tt]herefore|[Hh]ence)[,:]?\s+()" + alt +
                  R"()\b)"));
  scan(std::regex(R"((?:^|\s)()" + alt + R"()[.!]?\s*$)"));
  if (!best) return std::nullopt;
  return find_label(best->label, choices);
}

}  // namespace

std::optional<std::string> canonical_number(std::string_view s) {
  std::smatch m;
  const std::string str(s);
  if (!std::regex_search(str, m, number_regex())) return std::nullopt;
  std::string num;
  for (char c : m.str()) {
    if (c != ',' && c != '+') num += c;
  }
  bool negative = false;
  if (!num.empty() && num.front() == '-') {
    negative = true;
    num.erase(0, 1);
  }
  std::string int_part = num;
  std::string frac_part;
  if (const auto dot = num.find('.'); dot != std::string::npos) {
    int_part = num.substr(0, dot);
    frac_part = num.substr(dot + 1);
  }
  while (int_part.size() > 1 && int_part.front() == '0') int_part.erase(0, 1);
  if (int_part.empty()) int_part = "0";
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  std::string out = int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  if (negative && out != "0") out = "-" + out;
  return out;
}

std::string normalize_free_text(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : trim(s)) {
    if (detail::is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  while (!out.empty() && (out.back() == '.' || out.back() == '!' || out.back() == '?'))
    out.pop_back();
  return out;
}

std::optional<std::string> normalize_answer(std::string_view candidate, AnswerKind kind,
                                            const std::vector<Choice>& choices) {
  if (trim(candidate).empty()) return std::nullopt;
  switch (kind) {
    case AnswerKind::MultipleChoice: return normalize_choice(candidate, choices);
    case AnswerKind::YesNo: return first_yes_no(candidate, false);
    case AnswerKind::Numeric: return pick_number(candidate, false);
    case AnswerKind::FreeText: {
      std::string t = normalize_free_text(strip_punctuation_edges(candidate));
      if (t.empty()) return std::nullopt;
      return t;
    }
  }
  return std::nullopt;
}

std::optional<std::string> extract_answer(std::string_view raw, AnswerKind kind,
                                          const std::vector<Choice>& choices) {
  if (const auto line = last_answer_line(raw)) {
    if (auto v = normalize_answer(*line, kind, choices)) return v;
  }
  switch (kind) {
    case AnswerKind::MultipleChoice: return last_standalone_label(raw, choices);
    case AnswerKind::YesNo: return first_yes_no(raw, true);
    case AnswerKind::Numeric: return pick_number(raw, true);
    case AnswerKind::FreeText: return std::nullopt;
  }
  return std::nullopt;
}

bool answers_match(const std::optional<std::string>& extracted, std::string_view truth,
                   AnswerKind kind, const std::vector<Choice>& choices, double relative_epsilon) {
  if (!extracted) return false;
  const auto want = normalize_answer(truth, kind, choices);
  const auto got = normalize_answer(*extracted, kind, choices);
  if (!want || !got) return false;
  if (*want == *got) return true;
  if (kind != AnswerKind::Numeric) return false;
  const double a = std::stod(*want);
  const double b = std::stod(*got);
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) <= relative_epsilon * scale;
}

FinalAnswer make_final_answer(std::string raw, const QuestionInstance& question) {
  FinalAnswer out;
  ThinkSplit split = extract_think(raw);
  out.think = std::move(split.think);
  out.extracted = extract_answer(split.rest, question.answer_kind, question.choices);
  out.reasoning = std::move(raw);
  return out;
}

}  // namespace vreason
