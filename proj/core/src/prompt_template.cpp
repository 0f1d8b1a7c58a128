#include "vreason/prompt_template.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vreason/errors.hpp"

namespace vreason {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& default_template_sources();
}

namespace {

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

bool is_known_placeholder(std::string_view name) {
  return std::find(std::begin(kKnownPlaceholders), std::end(kKnownPlaceholders), name) !=
         std::end(kKnownPlaceholders);
}

PromptTemplate::PromptTemplate(std::string id, std::string text)
    : id_(std::move(id)), text_(std::move(text)) {
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) segments_.push_back({false, std::move(literal)});
    literal.clear();
  };
  const std::string& t = text_;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if (c == '{' && i + 1 < t.size() && t[i + 1] == '{') {
      literal += '{';
      ++i;
      continue;
    }
    if (c == '}' && i + 1 < t.size() && t[i + 1] == '}') {
      literal += '}';
      ++i;
      continue;
    }
    if (c == '{') {
      std::size_t j = i + 1;
      while (j < t.size() && is_name_char(t[j])) ++j;
      if (j > i + 1 && j < t.size() && t[j] == '}') {
        std::string name = t.substr(i + 1, j - i - 1);
        if (!is_known_placeholder(name))
          throw UnknownPlaceholder("template '" + id_ + "' references unknown placeholder {" +
                                   name + "}");
        flush();
        if (std::find(placeholders_.begin(), placeholders_.end(), name) == placeholders_.end())
          placeholders_.push_back(name);
        segments_.push_back({true, std::move(name)});
        i = j;
        continue;
      }
    }
    literal += c;
  }
  flush();
}

bool PromptTemplate::uses(std::string_view name) const {
  return std::find(placeholders_.begin(), placeholders_.end(), name) != placeholders_.end();
}

std::string render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  std::string out;
  for (const auto& seg : tmpl.segments_) {
    if (!seg.placeholder) {
      out += seg.value;
      continue;
    }
    const auto it = bindings.find(seg.value);
    if (it == bindings.end())
      throw MissingBinding("template '" + tmpl.id() + "' needs a value for {" + seg.value + "}");
    out += it->second;
  }
  return out;
}

const std::vector<std::string>& TemplateRegistry::known_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& [id, _] : detail::default_template_sources()) v.emplace_back(id);
    std::sort(v.begin(), v.end());
    return v;
  }();
  return ids;
}

TemplateRegistry TemplateRegistry::defaults() {
  TemplateRegistry reg;
  for (const auto& [id, text] : detail::default_template_sources())
    reg.set(PromptTemplate(std::string(id), strip_trailing_newlines(std::string(text))));
  return reg;
}

void TemplateRegistry::load_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw ConfigError("template directory '" + dir.string() + "' does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  const auto& ids = known_ids();
  for (const auto& path : files) {
    const std::string id = path.stem().string();
    if (std::find(ids.begin(), ids.end(), id) == ids.end())
      throw ConfigError("template file '" + path.string() + "' does not name a known template id");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read template '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    set(PromptTemplate(id, strip_trailing_newlines(text.str())));
  }
}

void TemplateRegistry::set(PromptTemplate tmpl) {
  const std::string id = tmpl.id();
  templates_.insert_or_assign(id, std::move(tmpl));
}

const PromptTemplate& TemplateRegistry::get(std::string_view id) const {
  const auto it = templates_.find(id);
  if (it == templates_.end()) throw ConfigError("no template with id '" + std::string(id) + "'");
  return it->second;
}

}  // namespace vreason
