#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sarges/annotation.hpp"
#include "sarges/jsonio.hpp"
#include "sarges/emotion.hpp"
#include "sarges/intent_chain.hpp"

namespace sarges {

struct Provenance {
  std::string model;
  std::string config_digest;
  std::string timestamp;  // ISO-8601 UTC
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// One (x_i, y_i) pair: plain input, inline-annotated output, and the same
/// labels in structured form.
struct DatasetRecord {
  std::string input;
  std::string output;
  std::vector<GestureLabel> labels;
  Provenance provenance;
  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

class DatasetError : public Error {
 public:
  DatasetError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

DatasetRecord make_record(const AnnotatedText& a, Provenance provenance);
/// Throws Error when output does not re-parse to (input, labels).
void check_record(const DatasetRecord& r);

/// One unit per sentence; throws EncodingError on invalid UTF-8.
std::vector<std::string> ingest_corpus(std::string_view text);

struct SkippedUnit {
  std::size_t index;
  std::string unit;
  std::string reason;
};

struct BuildResult {
  std::vector<DatasetRecord> records;  // corpus order
  std::vector<SkippedUnit> skipped;
  TokenUsage usage;
};

struct BuildInputs {
  const CharacterProfile& profile;
  const Ethogram& ethogram;
  ChatBackend& backend;
  ChainConfig config;
  int parallelism = 1;
  std::string timestamp;  // stamped on every record
};

BuildResult build_dataset(const std::vector<std::string>& corpus, const BuildInputs& in);

std::string write_dataset(const std::vector<DatasetRecord>& d);
std::vector<DatasetRecord> read_dataset(std::string_view content);
void write_dataset_file(const std::string& path, const std::vector<DatasetRecord>& d);
std::vector<DatasetRecord> read_dataset_file(const std::string& path);

struct DatasetStats {
  std::size_t record_count = 0;
  std::size_t label_count = 0;
  std::size_t sentence_count = 0;
  std::map<std::string, std::size_t> per_gesture;
  std::map<EmotionCategory, std::size_t> per_emotion;
  std::size_t unresolved = 0;  // labels with no ethogram entry (or no ethogram given)
  double mean_labels_per_sentence = 0.0;
};

DatasetStats dataset_stats(const std::vector<DatasetRecord>& d, const Ethogram* e = nullptr);
Json stats_to_json(const DatasetStats& s);

std::string now_utc_iso8601();

}  // namespace sarges
