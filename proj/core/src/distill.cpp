#include "vreason/distill.hpp"

#include <fstream>
#include <future>
#include <set>

#include <spdlog/spdlog.h>

#include "json_util.hpp"
#include "text_util.hpp"
#include "vreason/errors.hpp"

namespace vreason {

namespace {

using detail::json;

// Insertion-ordered so the fields come out in the documented order.
nlohmann::ordered_json record_to_json(const SftRecord& r) {
  nlohmann::ordered_json messages = nlohmann::ordered_json::array();
  for (const SftMessage& m : r.messages)
    messages.push_back(nlohmann::ordered_json{{"role", m.role}, {"content", m.content}});
  return nlohmann::ordered_json{{"question_id", r.question_id},
              {"images", r.images},
              {"messages", std::move(messages)},
              {"source_configs", r.source_configs},
              {"agreed_answer", r.agreed_answer}};
}

}  // namespace

std::string sft_user_content(const QuestionInstance& question) {
  std::string out;
  for (std::size_t i = 0; i < question.images.size(); ++i) out += "<image>\n";
  out += question.question;
  if (!question.choices.empty()) out += "\nOptions:\n" + question.render_choices();
  return out;
}

DistillRun distill_pair(const QuestionInstance& question, const PipelineEnv& env,
                        const DistillConfig& primary, const DistillConfig& secondary,
                        const DistillOptions& options) {
  auto run = [&](const DistillConfig& c) {
    return run_proreason(question, env, c.bindings, c.policy, c.merge);
  };
  DistillRun out;
  if (options.parallel) {
    auto second = std::async(std::launch::async, run, std::cref(secondary));
    out.primary = run(primary);
    out.secondary = second.get();
  } else {
    out.primary = run(primary);
    out.secondary = run(secondary);
  }

  const auto& a = out.primary.final.extracted;
  const auto& b = out.secondary.final.extracted;
  if (!a || !b ||
      !answers_match(a, *b, question.answer_kind, question.choices, options.numeric_epsilon)) {
    spdlog::info("distill: {} disagreement ({}: {}, {}: {})", question.id, primary.id,
                 a.value_or("<none>"), secondary.id, b.value_or("<none>"));
    return out;
  }

  SftRecord record;
  record.question_id = question.id;
  for (const ImageRef& image : question.images) record.images.push_back(image.describe());
  record.messages.push_back({"user", sft_user_content(question)});
  record.messages.push_back({"assistant", out.primary.final.reasoning});
  record.source_configs = {primary.id, secondary.id};
  record.agreed_answer = *a;
  out.record = std::move(record);
  return out;
}

std::string sft_record_to_line(const SftRecord& record) { return record_to_json(record).dump(); }

SftRecord sft_record_from_line(const std::string& line) {
  try {
    const json j = json::parse(line);
    SftRecord r;
    r.question_id = j.at("question_id").get<std::string>();
    r.images = j.at("images").get<std::vector<std::string>>();
    for (const json& m : j.at("messages"))
      r.messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    r.source_configs = j.at("source_configs").get<std::vector<std::string>>();
    r.agreed_answer = j.at("agreed_answer").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed SFT record: ") + e.what());
  }
}

std::size_t export_sft(const std::vector<SftRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  std::set<std::string> seen;
  for (const SftRecord& r : records) {
    if (!seen.insert(r.question_id).second)
      spdlog::warn("export_sft: duplicate question id '{}'", r.question_id);
    out << sft_record_to_line(r) << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
  return records.size();
}

std::vector<SftRecord> read_sft_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<SftRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (detail::trim(line).empty()) continue;
    try {
      out.push_back(sft_record_from_line(line));
    } catch (const ParseError& e) {
      throw RecordFormatError(n, e.what());
    }
  }
  return out;
}

}  // namespace vreason
