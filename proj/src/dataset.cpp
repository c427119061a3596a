#include "sarges/dataset.hpp"

#include <ctime>

#include "sarges/batch.hpp"
#include "sarges/ethogram.hpp"
#include "sarges/sidecar.hpp"
#include "sarges/utf8.hpp"

namespace sarges {
namespace {

bool same_labels(const std::vector<GestureLabel>& a, const std::vector<GestureLabel>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].gesture_id != b[i].gesture_id || a[i].description != b[i].description ||
        a[i].start_char != b[i].start_char || a[i].duration_chars != b[i].duration_chars) {
      return false;
    }
  }
  return true;
}

}  // namespace

DatasetRecord make_record(const AnnotatedText& a, Provenance provenance) {
  DatasetRecord r;
  r.input = a.clean_text;
  r.output = render_inline(a);
  r.labels = a.labels;
  for (auto& l : r.labels) l.resolved.reset();
  r.provenance = std::move(provenance);
  return r;
}

void check_record(const DatasetRecord& r) {
  const auto parsed = parse_inline(r.output);
  if (parsed.clean_text != r.input) throw Error("output does not re-parse to the input text");
  if (!same_labels(parsed.labels, r.labels)) {
    throw Error("structured labels disagree with the inline output");
  }
}

std::vector<std::string> ingest_corpus(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::vector<std::string> units;
  for (const auto& s : split_sentences(std::u32string_view(cps))) {
    auto unit = utf8::trim(utf8::encode(std::u32string_view(cps).substr(
        s.start_char, s.end_char - s.start_char)));
    if (!unit.empty()) units.push_back(std::move(unit));
  }
  return units;
}

BuildResult build_dataset(const std::vector<std::string>& corpus, const BuildInputs& in) {
  in.config.check();
  in.profile.check();
  BuildResult out;
  const auto outcomes =
      run_batch(corpus, in.profile, in.ethogram, in.backend, in.config, in.parallelism);
  const Provenance prov{in.backend.capability().model_name, in.config.digest(), in.timestamp};
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.ok()) {
      out.skipped.push_back({i, corpus[i], o.error});
      continue;
    }
    out.usage.merge(o.result->usage);
    out.records.push_back(make_record(o.result->result, prov));
  }
  return out;
}

std::string write_dataset(const std::vector<DatasetRecord>& d) {
  std::string out;
  for (const auto& r : d) {
    Json j;
    j["input"] = r.input;
    j["output"] = r.output;
    j["labels"] = labels_to_json(r.labels);
    j["provenance"] = {{"model", r.provenance.model},
                       {"config_digest", r.provenance.config_digest},
                       {"timestamp", r.provenance.timestamp}};
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<DatasetRecord> read_dataset(std::string_view content) {
  std::vector<DatasetRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    const auto line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (utf8::trim(line).empty()) continue;
    try {
      const auto j = Json::parse(line);
      DatasetRecord r;
      r.input = j.at("input").get<std::string>();
      r.output = j.at("output").get<std::string>();
      r.labels = labels_from_json(j.at("labels"));
      const auto& p = j.at("provenance");
      r.provenance = {p.at("model").get<std::string>(), p.at("config_digest").get<std::string>(),
                      p.at("timestamp").get<std::string>()};
      check_record(r);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(std::string("malformed dataset record: ") + e.what(), line_no);
    } catch (const Error& e) {
      throw DatasetError(std::string("inconsistent dataset record: ") + e.what(), line_no);
    }
  }
  return out;
}

void write_dataset_file(const std::string& path, const std::vector<DatasetRecord>& d) {
  write_text_file(path, write_dataset(d));
}

std::vector<DatasetRecord> read_dataset_file(const std::string& path) {
  return read_dataset(read_text_file(path));
}

DatasetStats dataset_stats(const std::vector<DatasetRecord>& d, const Ethogram* e) {
  DatasetStats s;
  s.record_count = d.size();
  for (const auto& r : d) {
    s.sentence_count += split_sentences(r.input).size();
    for (const auto& l : r.labels) {
      ++s.label_count;
      ++s.per_gesture[l.gesture_id];
      const GestureEntry* entry = e ? e->find(l.gesture_id) : nullptr;
      if (entry) {
        ++s.per_emotion[entry->emotion];
      } else {
        ++s.unresolved;
      }
    }
  }
  if (s.sentence_count > 0) {
    s.mean_labels_per_sentence =
        static_cast<double>(s.label_count) / static_cast<double>(s.sentence_count);
  }
  return s;
}

Json stats_to_json(const DatasetStats& s) {
  Json j;
  j["record_count"] = s.record_count;
  j["label_count"] = s.label_count;
  j["sentence_count"] = s.sentence_count;
  j["mean_labels_per_sentence"] = s.mean_labels_per_sentence;
  Json g = Json::object();
  for (const auto& [id, n] : s.per_gesture) g[id] = n;
  j["per_gesture"] = std::move(g);
  Json em = Json::object();
  for (auto c : kAllEmotions) {
    auto it = s.per_emotion.find(c);
    em[std::string(to_string(c))] = it == s.per_emotion.end() ? 0 : it->second;
  }
  j["per_emotion"] = std::move(em);
  j["unresolved"] = s.unresolved;
  return j;
}

std::string now_utc_iso8601() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sarges
