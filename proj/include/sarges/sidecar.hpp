#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sarges/jsonio.hpp"

#include "sarges/annotation.hpp"

namespace sarges {

/// Lossless structured form of labels: {id, description, start_char,
/// duration_chars}. Shared by sidecar, dataset and evaluation files.
Json label_to_json(const GestureLabel& l);
GestureLabel label_from_json(const Json& j);
Json labels_to_json(const std::vector<GestureLabel>& labels);
std::vector<GestureLabel> labels_from_json(const Json& j);

/// {"text": clean, "labels": [...]}; extra keys are preserved by callers.
Json sidecar_record(const AnnotatedText& a);
AnnotatedText sidecar_from_json(const Json& j);

/// Reads a line-delimited sidecar file. Blank lines are skipped. Errors carry
/// the 1-based line number.
std::vector<Json> read_jsonl(std::string_view content, const std::string& source_name);
std::vector<Json> read_jsonl_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace sarges
