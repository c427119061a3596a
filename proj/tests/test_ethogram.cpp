#include <doctest.h>

#include <algorithm>

#include "sarges/ethogram.hpp"
#include "sarges/sidecar.hpp"
#include "support.hpp"

using namespace sarges;
using sarges::testing::fixture_path;
using sarges::testing::shipped_ethogram;

namespace {

GestureEntry entry(const char* id, const char* name, std::vector<std::string> kw = {"hi"}) {
  GestureEntry e;
  e.id = *GestureId::parse(id);
  e.name = name;
  e.sub_intent = "Display Greeting";
  e.description = "desc";
  e.guideline = "guide";
  e.keywords = std::move(kw);
  return e;
}

std::vector<GestureEntry> numbered(std::vector<GestureEntry> v) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i].flat_id = static_cast<int>(i + 1);
  return v;
}

}  // namespace

TEST_CASE("gesture ids") {
  CHECK(GestureId::parse("A-15") == GestureId{'A', 15});
  CHECK(GestureId::parse("d-2") == GestureId{'D', 2});
  CHECK_FALSE(GestureId::parse("A-0"));
  CHECK_FALSE(GestureId::parse("A15"));
  CHECK_FALSE(GestureId::parse("AB-1"));
  CHECK_FALSE(GestureId::parse("A-"));
  CHECK_FALSE(GestureId::parse("A--1"));
  CHECK(GestureId{'C', 7}.canonical() == "C-7");
  CHECK(GestureId{'Z', 1}.intent() == std::nullopt);
  CHECK(GestureId{'B', 1}.intent() == IntentCategory::ConcreteReinforcement);
  CHECK(code_of(IntentCategory::ComfortBehaviors) == 'D');
}

TEST_CASE("load_ethogram on the table fixture") {
  const auto e = load_ethogram_file(fixture_path("ethogram_table.json"));
  CHECK(e.size() == 8);
  CHECK(e.lookup("A-1").name == "Stretch Shoulders");
  CHECK(e.lookup("A-1").sub_intent == "Display Appearance");
  CHECK(e.lookup("D-2").name == "Cover Eyes with Hands");
  CHECK(e.lookup("A-2").name == "Thumbs Down");
  CHECK(e.lookup("B-2").name == "Form Hands into a Circle");
  CHECK(e.lookup("C-2").name == "Shake Interlocked Fists");
  // flat ids absent from the document are assigned in document order
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(e.entries()[i].flat_id == static_cast<int>(i + 1));
  }
  CHECK(e.lookup("1").name == "Stretch Shoulders");
  CHECK(&e.lookup("8") == &e.lookup("D-2"));
  CHECK(validate(e).empty());
}

TEST_CASE("lookup errors") {
  const auto& e = shipped_ethogram();
  CHECK_THROWS_AS(e.lookup("Z-9"), UnknownIdError);
  CHECK_THROWS_AS(e.lookup("A-999"), UnknownIdError);
  CHECK_THROWS_AS(e.lookup("0"), UnknownIdError);
  CHECK_THROWS_AS(e.lookup("101"), UnknownIdError);
  CHECK_THROWS_AS(e.lookup(""), UnknownIdError);
  CHECK(e.find("nonsense") == nullptr);
  try {
    e.lookup("Z-9");
  } catch (const UnknownIdError& err) {
    CHECK(err.id() == "Z-9");
  }
}

TEST_CASE("load errors") {
  CHECK_THROWS_AS(load_ethogram(R"({"entries": []})"), EthogramError);
  try {
    load_ethogram(R"({"entries": []})");
  } catch (const EthogramError& err) {
    REQUIRE(err.diagnostics().size() == 1);
    CHECK(err.diagnostics()[0].code == "empty-ethogram");
  }
  try {
    load_ethogram_file(fixture_path("ethogram_duplicate_id.json"));
    FAIL("expected EthogramError");
  } catch (const EthogramError& err) {
    REQUIRE(err.diagnostics().size() == 1);
    CHECK(err.diagnostics()[0].code == "duplicate-id");
    CHECK(std::string(err.what()).find("D-1") != std::string::npos);
  }
  CHECK_THROWS_AS(load_ethogram("{\"entries\": [\n{\"id\": \"A-1\",\n}"), EthogramError);
  try {
    load_ethogram("{\"entries\": [\n{\"id\": \"A-1\",\n]}");
  } catch (const EthogramError& err) {
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_ethogram(R"({"entries": [{"id": "A-1"}]})"), EthogramError);
  CHECK_THROWS_AS(load_ethogram(R"({"gestures": []})"), EthogramError);
  CHECK_THROWS_AS(load_ethogram_file("/nonexistent/ethogram.json"), IoError);
}

TEST_CASE("search_by_keyword") {
  const auto& e = shipped_ethogram();
  const auto excited = e.search_by_keyword("excited");
  REQUIRE(excited.size() == 1);
  CHECK(excited[0]->name == "Rub Hands");
  CHECK(std::find(excited[0]->keywords.begin(), excited[0]->keywords.end(), "pleading") !=
        excited[0]->keywords.end());
  CHECK(e.search_by_keyword("EXCITED") == excited);
  CHECK(e.search_by_keyword("no such keyword").empty());
  CHECK(e.search_by_keyword("excite").empty());
  CHECK_THROWS_AS(e.search_by_keyword(""), std::invalid_argument);

  // Linear scan oracle over the whole fixture, for every keyword in it.
  for (const auto& g : e.entries()) {
    for (const auto& k : g.keywords) {
      std::vector<const GestureEntry*> expected;
      for (const auto& h : e.entries()) {
        if (std::find(h.keywords.begin(), h.keywords.end(), k) != h.keywords.end()) {
          expected.push_back(&h);
        }
      }
      REQUIRE(e.search_by_keyword(k) == expected);
    }
  }
  const auto nervous = e.search_by_keyword("nervous");
  REQUIRE(nervous.size() == 2);
  CHECK(nervous[0]->flat_id < nervous[1]->flat_id);
}

TEST_CASE("validate diagnostics") {
  auto one = [](const std::vector<GestureEntry>& v) {
    const auto d = validate_entries(v);
    REQUIRE(d.size() == 1);
    return d[0];
  };
  CHECK(validate_entries(numbered({entry("A-1", "a"), entry("B-1", "b")})).empty());

  auto dup_flat = numbered({entry("A-1", "a"), entry("A-2", "b")});
  dup_flat[1].flat_id = 1;
  auto d = one(dup_flat);
  CHECK(d.code == "duplicate-flat-id");
  CHECK(d.severity == Severity::Error);
  CHECK(d.locus == "entry 2 (A-2)");

  d = one(numbered({entry("A-1", "a"), entry("A-1", "b")}));
  CHECK(d.code == "duplicate-id");

  d = one(numbered({entry("A-1", ""), entry("A-2", "b")}));
  CHECK(d.code == "empty-field");
  CHECK(d.message.find("name") != std::string::npos);

  d = one(numbered({entry("Q-1", "a")}));
  CHECK(d.code == "unknown-category");

  d = one(numbered({entry("A-1", "a", {"Loud"})}));
  CHECK(d.code == "invalid-keyword");

  auto skipped = numbered({entry("A-1", "a"), entry("A-2", "b")});
  skipped[1].flat_id = 5;
  CHECK(one(skipped).code == "flat-id-sequence");

  CHECK(validate_entries({}).size() == 1);
  CHECK_THROWS_AS(Ethogram::build(numbered({entry("A-1", "a"), entry("A-1", "b")})),
                  EthogramError);
}

TEST_CASE("seeded corruption fixtures") {
  struct Case {
    const char* file;
    const char* code;
    const char* locus;
  };
  for (const auto& c : {Case{"ethogram_duplicate_id.json", "duplicate-id", "entry 82 (D-1)"},
                        Case{"ethogram_bad_category.json", "unknown-category", "entry 37 (E-5)"},
                        Case{"ethogram_empty_name.json", "empty-field", "entry 2 (A-2)"}}) {
    CAPTURE(c.file);
    const auto d = validate_entries(parse_ethogram_document(read_text_file(fixture_path(c.file))));
    REQUIRE(d.size() == 1);
    CHECK(d[0].code == c.code);
    CHECK(d[0].locus == c.locus);
  }
}

TEST_CASE("shipped ethogram") {
  const auto& e = shipped_ethogram();
  CHECK(e.size() >= 77);
  CHECK(validate(e).empty());
  for (char letter : {'A', 'B', 'C', 'D'}) {
    CHECK(std::any_of(e.entries().begin(), e.entries().end(),
                      [&](const GestureEntry& g) { return g.id.letter == letter; }));
  }
  CHECK(e.lookup("A-97").name == "Spread Arms Wide");
  CHECK(e.lookup("A-6").name == "Clap Hands");
  CHECK(e.lookup("9").name == "Touch Forehead");
}

TEST_CASE("property: canonical and flat lookups agree for every entry") {
  for (const auto* path : {"ethogram.json"}) {
    const auto e = load_ethogram_file(sarges::testing::data_path(path));
    for (const auto& g : e.entries()) {
      const auto& by_id = e.lookup(g.id.canonical());
      const auto& by_flat = e.lookup(std::to_string(g.flat_id));
      REQUIRE(&by_id == &by_flat);
      REQUIRE(by_id == g);
    }
  }
}

TEST_CASE("property: load inverts render") {
  for (const auto& path : {sarges::testing::data_path("ethogram.json"),
                           fixture_path("ethogram_table.json")}) {
    const auto e = load_ethogram_file(path);
    const auto text = render_ethogram(e);
    const auto back = load_ethogram(text);
    REQUIRE(back == e);
    REQUIRE(render_ethogram(back) == text);
  }
  // The shipped file is stored in rendered form.
  CHECK(render_ethogram(shipped_ethogram()) ==
        read_text_file(sarges::testing::data_path("ethogram.json")));
}
