#include <doctest.h>

#include <numeric>
#include <random>

#include "sarges/dataset.hpp"
#include "sarges/sidecar.hpp"
#include "support.hpp"

using namespace sarges;
namespace st = sarges::testing;

namespace {

const Provenance kProv{"scripted-gpt-4", "0123456789abcdef", "1970-01-01T00:00:00Z"};

BuildInputs inputs(ChatBackend& b, int parallelism = 1) {
  ChainConfig cfg;
  cfg.max_reflection_rounds = 0;
  static const auto host = CharacterProfile::default_host();
  return {host, st::shipped_ethogram(), b, cfg, parallelism, kProv.timestamp};
}

}  // namespace

TEST_CASE("ingest_corpus") {
  CHECK(ingest_corpus("A. B!") == std::vector<std::string>{"A.", "B!"});
  CHECK(ingest_corpus("").empty());
  CHECK(ingest_corpus("\n\n  \n").empty());
  CHECK(ingest_corpus("First one.  Second one?\nThird one!") ==
        std::vector<std::string>{"First one.", "Second one?", "Third one!"});
  CHECK(ingest_corpus("no terminator\n") == std::vector<std::string>{"no terminator"});
  CHECK(ingest_corpus("Très bien. 日本へようこそ。次") ==
        std::vector<std::string>{"Très bien.", "日本へようこそ。", "次"});
  CHECK_THROWS_AS(ingest_corpus("bad \xC3"), EncodingError);
}

TEST_CASE("records re-parse consistently") {
  const auto r = make_record(parse_inline(st::kWelcomeOutput), kProv);
  CHECK(r.input == st::kWelcomeInput);
  CHECK(r.output == st::kWelcomeOutput);
  CHECK(r.labels.size() == 2);
  CHECK_NOTHROW(check_record(r));
  auto broken = r;
  broken.labels[0].start_char += 1;
  CHECK_THROWS(check_record(broken));
  auto wrong_text = r;
  wrong_text.input += "!";
  CHECK_THROWS(check_record(wrong_text));
}

TEST_CASE("build_dataset on the welcome sentence") {
  st::Responder r;
  r.add(st::kWelcomeInput, st::welcome_script());
  FunctionBackend fn([&](const ChatRequest& q) { return r(q); }, st::scripted_capability());
  const auto out = build_dataset({st::kWelcomeInput}, inputs(fn));
  REQUIRE(out.records.size() == 1);
  CHECK(out.skipped.empty());
  const auto& rec = out.records[0];
  CHECK(rec.input == st::kWelcomeInput);
  CHECK(rec.output == st::kWelcomeOutput);
  CHECK(rec.provenance.model == "scripted-gpt-4");
  CHECK(rec.provenance.timestamp == "1970-01-01T00:00:00Z");
  CHECK(rec.provenance.config_digest == inputs(fn).config.digest());
  CHECK(out.usage.request_count == 2);

  const auto s = dataset_stats(out.records, &st::shipped_ethogram());
  CHECK(s.label_count == 2);
  CHECK(s.per_gesture == std::map<std::string, std::size_t>{{"A-6", 1}, {"A-97", 1}});
  CHECK(s.per_emotion.at(EmotionCategory::Joy) == 2);
  CHECK(s.sentence_count == 2);
  CHECK(s.mean_labels_per_sentence == 1.0);
}

TEST_CASE("build_dataset skips failing units and keeps corpus order") {
  st::Responder r;
  std::vector<std::string> corpus;
  for (std::size_t i = 0; i < 10; ++i) {
    auto [text, script] = st::synthetic_unit(i * 7);
    r.add(text, script);
    corpus.push_back(text);
  }
  const std::string junk = "This one gets junk back.";
  r.add(junk, st::Script{{"no", "no", "still no"}, "", {}});
  corpus.insert(corpus.begin() + 4, junk);
  FunctionBackend fn([&](const ChatRequest& q) { return r(q); });
  const auto out = build_dataset(corpus, inputs(fn, 4));
  REQUIRE(out.skipped.size() == 1);
  CHECK(out.skipped[0].index == 4);
  CHECK(out.skipped[0].unit == junk);
  CHECK(out.skipped[0].reason.find("label-retry-2") != std::string::npos);
  REQUIRE(out.records.size() == 10);
  std::size_t k = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i == 4) continue;
    CHECK(out.records[k++].input == corpus[i]);
  }
  for (const auto& rec : out.records) CHECK_NOTHROW(check_record(rec));
}

TEST_CASE("dataset files round-trip") {
  std::vector<DatasetRecord> d = {
      make_record(parse_inline(st::kWelcomeOutput), kProv),
      make_record(parse_inline("Ça va (id: A-3, description: Thumbs Up) très bien, 日本の (id: C-2) 友達!"), kProv),
      make_record(parse_inline("Nothing to see."), kProv),
  };
  const auto text = write_dataset(d);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  CHECK(read_dataset(text) == d);
  CHECK(write_dataset(read_dataset(text)) == text);

  st::TempDir dir;
  write_dataset_file(dir.file("d.jsonl"), d);
  CHECK(read_dataset_file(dir.file("d.jsonl")) == d);
  CHECK(read_dataset("").empty());

  const auto second_nl = text.find('\n', text.find('\n') + 1);
  const auto truncated = text.substr(0, second_nl - 5) + "\n";
  try {
    read_dataset(truncated);
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(e.line() == 2);
  }
  auto tampered = d;
  tampered[1].labels[0].duration_chars = 9;
  try {
    read_dataset(write_dataset(tampered));
    FAIL("expected DatasetError");
  } catch (const DatasetError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(read_dataset_file(dir.file("missing.jsonl")), IoError);
}

TEST_CASE("dataset_stats") {
  const auto empty = dataset_stats({});
  CHECK(empty.record_count == 0);
  CHECK(empty.label_count == 0);
  CHECK(empty.sentence_count == 0);
  CHECK(empty.per_gesture.empty());
  CHECK(empty.unresolved == 0);
  CHECK(empty.mean_labels_per_sentence == 0.0);

  const auto no_ethogram = dataset_stats({make_record(parse_inline(st::kWelcomeOutput), kProv)});
  CHECK(no_ethogram.unresolved == 2);

  const auto j = stats_to_json(no_ethogram);
  CHECK(j["label_count"] == 2);
  CHECK(j["per_emotion"].size() == 5);
}

TEST_CASE("property: stats frequencies sum to label_count") {
  std::mt19937 rng(5);
  const auto& e = st::shipped_ethogram();
  std::uniform_int_distribution<std::size_t> n(0, 12), unit(0, 99);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<DatasetRecord> d;
    std::size_t expected_labels = 0;
    for (auto k = n(rng); k > 0; --k) {
      auto a = parse_inline(st::synthetic_unit(unit(rng)).second.label[0]);
      if (std::bernoulli_distribution(0.2)(rng) && !a.labels.empty()) a.labels[0].gesture_id = "Z-1";
      expected_labels += a.labels.size();
      d.push_back(make_record(a, kProv));
    }
    const auto s = dataset_stats(d, &e);
    REQUIRE(s.label_count == expected_labels);
    std::size_t by_gesture = 0, by_emotion = 0;
    for (const auto& [id, c] : s.per_gesture) by_gesture += c;
    for (const auto& [em, c] : s.per_emotion) by_emotion += c;
    REQUIRE(by_gesture == s.label_count);
    REQUIRE(by_emotion + s.unresolved == s.label_count);
  }
}
