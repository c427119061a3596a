#include "sarges/sidecar.hpp"

#include <fstream>
#include <sstream>

#include "sarges/utf8.hpp"

namespace sarges {
namespace {

template <typename T>
T require(const Json& j, const char* key, const char* what) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string(what) + ": missing key '" + key + "'");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string(what) + ": key '" + key + "' has the wrong type");
  }
}

}  // namespace

Json label_to_json(const GestureLabel& l) {
  Json j;
  j["id"] = l.gesture_id;
  j["description"] = l.description;
  j["start_char"] = l.start_char;
  j["duration_chars"] = l.duration_chars;
  return j;
}

GestureLabel label_from_json(const Json& j) {
  if (!j.is_object()) throw Error("label must be an object");
  GestureLabel l;
  l.gesture_id = require<std::string>(j, "id", "label");
  l.description = j.contains("description") ? require<std::string>(j, "description", "label") : "";
  l.start_char = require<std::size_t>(j, "start_char", "label");
  l.duration_chars = require<std::size_t>(j, "duration_chars", "label");
  return l;
}

Json labels_to_json(const std::vector<GestureLabel>& labels) {
  Json arr = Json::array();
  for (const auto& l : labels) arr.push_back(label_to_json(l));
  return arr;
}

std::vector<GestureLabel> labels_from_json(const Json& j) {
  if (!j.is_array()) throw Error("'labels' must be an array");
  std::vector<GestureLabel> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(label_from_json(x));
  return out;
}

Json sidecar_record(const AnnotatedText& a) {
  Json j;
  j["text"] = a.clean_text;
  j["labels"] = labels_to_json(a.labels);
  return j;
}

AnnotatedText sidecar_from_json(const Json& j) {
  if (!j.is_object()) throw Error("sidecar record must be an object");
  AnnotatedText a;
  a.clean_text = require<std::string>(j, "text", "sidecar record");
  auto it = j.find("labels");
  if (it == j.end()) throw Error("sidecar record: missing key 'labels'");
  a.labels = labels_from_json(*it);
  check_invariants(a);
  return a;
}

std::vector<Json> read_jsonl(std::string_view content, const std::string& source_name) {
  std::vector<Json> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (utf8::trim(line).empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(source_name + ":" + std::to_string(line_no) + ": malformed record: " + e.what());
    }
  }
  return out;
}

std::vector<Json> read_jsonl_file(const std::string& path) {
  return read_jsonl(read_text_file(path), path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("cannot write '" + path + "'");
}

}  // namespace sarges
