#include "vreason/dataset.hpp"

#include <fstream>
#include <regex>
#include <set>

#include "json_util.hpp"
#include "text_util.hpp"
#include "vreason/answer.hpp"
#include "vreason/errors.hpp"

namespace vreason {

namespace {

using detail::json;

std::string string_field(const json& j, const char* key, std::size_t index, bool required) {
  if (!j.contains(key) || j.at(key).is_null()) {
    if (required) throw SchemaError(index, std::string("missing field '") + key + "'");
    return {};
  }
  const json& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw SchemaError(index, std::string("field '") + key + "' must be a string");
}

std::vector<Choice> parse_choices(const json& j, std::size_t index) {
  std::vector<Choice> out;
  if (!j.contains("choices") || j.at("choices").is_null()) return out;
  const json& arr = j.at("choices");
  if (!arr.is_array()) throw SchemaError(index, "field 'choices' must be a list");
  if (arr.size() > 26) throw SchemaError(index, "more than 26 choices");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& c = arr[i];
    if (c.is_string()) {
      out.push_back({std::string(1, static_cast<char>('A' + i)), c.get<std::string>()});
    } else if (c.is_object() && c.contains("label") && c.contains("text") &&
               c.at("label").is_string() && c.at("text").is_string()) {
      out.push_back({c.at("label").get<std::string>(), c.at("text").get<std::string>()});
    } else {
      throw SchemaError(index, "choice " + std::to_string(i) + " must be a string or {label, text}");
    }
  }
  return out;
}

AnswerKind infer_kind(const std::vector<Choice>& choices, const std::optional<std::string>& answer) {
  if (!choices.empty()) return AnswerKind::MultipleChoice;
  if (!answer) return AnswerKind::FreeText;
  const std::string a = detail::to_lower(detail::trim(*answer));
  if (a == "yes" || a == "no") return AnswerKind::YesNo;
  static const std::regex kNumber(R"([-+]?(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|[-+]?\.\d+)");
  if (std::regex_match(a, kNumber)) return AnswerKind::Numeric;
  return AnswerKind::FreeText;
}

std::vector<ImageRef> parse_images(const json& j, std::size_t index, const DatasetOptions& options) {
  std::vector<std::string> paths;
  if (j.contains("images") && !j.at("images").is_null()) {
    if (!j.at("images").is_array()) throw SchemaError(index, "field 'images' must be a list");
    for (const json& p : j.at("images")) {
      if (!p.is_string()) throw SchemaError(index, "image paths must be strings");
      paths.push_back(p.get<std::string>());
    }
  } else if (j.contains("image") && !j.at("image").is_null()) {
    paths.push_back(string_field(j, "image", index, true));
  }
  std::vector<ImageRef> out;
  for (const std::string& p : paths) {
    std::filesystem::path full(p);
    if (full.is_relative()) full = options.image_root / full;
    if (options.check_images && !std::filesystem::is_regular_file(full))
      throw MissingImage("record " + std::to_string(index) + ": image '" + full.string() +
                         "' not found");
    out.push_back(ImageRef::from_path(full));
  }
  return out;
}

QuestionInstance parse_record(const json& j, std::size_t index, const DatasetOptions& options) {
  if (!j.is_object()) throw SchemaError(index, "record is not an object");
  QuestionInstance q;
  q.id = string_field(j, "id", index, true);
  if (detail::trim(q.id).empty()) throw SchemaError(index, "empty id");
  q.question = string_field(j, "question", index, true);
  q.dataset = string_field(j, "dataset", index, false);
  if (q.dataset.empty()) q.dataset = options.dataset_name;
  q.choices = parse_choices(j, index);
  q.images = parse_images(j, index, options);

  const std::string answer = string_field(j, "answer", index, false);
  if (!detail::trim(answer).empty()) q.ground_truth = std::string(detail::trim(answer));

  const std::string kind = string_field(j, "answer_type", index, false);
  try {
    q.answer_kind = kind.empty() ? infer_kind(q.choices, q.ground_truth)
                                 : answer_kind_from_string(kind);
  } catch (const InvalidArgument& e) {
    throw SchemaError(index, e.what());
  }

  if (q.answer_kind == AnswerKind::MultipleChoice && q.ground_truth) {
    for (const Choice& c : q.choices) {
      if (detail::iequals(c.label, *q.ground_truth)) {
        q.ground_truth = c.label;
        break;
      }
      if (detail::iequals(detail::trim(c.text), *q.ground_truth)) {
        q.ground_truth = c.label;
        break;
      }
    }
  }
  try {
    q.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError(index, e.what());
  }
  return q;
}

}  // namespace

std::vector<QuestionInstance> load_dataset(const std::filesystem::path& path,
                                           const DatasetOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  DatasetOptions opts = options;
  if (opts.dataset_name.empty()) opts.dataset_name = path.stem().string();
  if (opts.image_root.empty()) opts.image_root = path.parent_path();

  std::vector<QuestionInstance> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(index, std::string("not valid JSON: ") + e.what());
    }
    QuestionInstance q = parse_record(j, index, opts);
    if (!ids.insert(q.id).second) throw SchemaError(index, "duplicate id '" + q.id + "'");
    out.push_back(std::move(q));
    ++index;
  }
  return out;
}

}  // namespace vreason
