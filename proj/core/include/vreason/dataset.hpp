#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vreason/types.hpp"

namespace vreason {

struct DatasetOptions {
  // Used for records without their own "dataset" field. Defaults to the
  // file stem.
  std::string dataset_name;
  // Relative image paths resolve against this; defaults to the directory
  // holding the dataset file.
  std::filesystem::path image_root;
  // Fail with MissingImage up front instead of at the first model call.
  bool check_images = true;
};

// Reads a line-delimited JSON dataset. Each non-blank line is one record:
//
//   {"id": "q1", "image": "img/q1.png", "question": "...",
//    "choices": ["red", "blue"], "answer": "B", "answer_type": "...",
//    "dataset": "...", "split": "..."}
//
// "images" (a list) may replace "image". Choices are strings (labelled A,
// B, ...) or {"label", "text"} objects. A multiple-choice answer that equals
// a choice's text is mapped to its label. Without "answer_type" the kind is
// inferred: choices -> multiple_choice, yes/no answer -> yes_no, numeric
// answer -> numeric, otherwise free_text.
//
// Throws SchemaError (zero-based record index) for a malformed record or a
// duplicate id, MissingImage for an unreadable image, IoError if the file
// cannot be opened.
std::vector<QuestionInstance> load_dataset(const std::filesystem::path& path,
                                           const DatasetOptions& options = {});

}  // namespace vreason
