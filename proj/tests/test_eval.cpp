#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include "sarges/eval.hpp"
#include "support.hpp"

using namespace sarges;
namespace st = sarges::testing;

namespace {

constexpr auto J = EmotionCategory::Joy;
constexpr auto F = EmotionCategory::Fear;
constexpr auto S = EmotionCategory::Special;

CategorySet set_of(std::initializer_list<EmotionCategory> cs) {
  CategorySet s;
  for (auto c : cs) s.insert(c);
  return s;
}

GestureLabel label(const char* id) { return {id, "", 0, 1, {}}; }

// Counting oracle over plain membership tables.
struct Membership {
  std::array<bool, 5> gold{};
  std::array<bool, 5> pred{};
};

std::pair<std::int64_t, std::int64_t> oracle(const std::vector<Membership>& cases) {
  std::int64_t num = 0, den = 0;
  for (const auto& c : cases) {
    for (int k = 0; k < 5; ++k) {
      if (c.gold[k]) {
        ++den;
        if (c.pred[k]) ++num;
      }
    }
  }
  return {num, den};
}

std::vector<CategoryCase> to_cases(const std::vector<Membership>& m) {
  std::vector<CategoryCase> out;
  for (const auto& c : m) {
    CategoryCase cc;
    for (int k = 0; k < 5; ++k) {
      if (c.gold[k]) cc.gold.insert(kAllEmotions[k]);
      if (c.pred[k]) cc.predicted.insert(kAllEmotions[k]);
    }
    out.push_back(cc);
  }
  return out;
}

std::vector<Membership> random_memberships(std::mt19937& rng, std::size_t n) {
  std::bernoulli_distribution coin(0.4);
  std::vector<Membership> m(n);
  for (auto& c : m) {
    for (int k = 0; k < 5; ++k) {
      c.gold[k] = coin(rng);
      c.pred[k] = coin(rng);
    }
  }
  m[0].gold[std::uniform_int_distribution<int>(0, 4)(rng)] = true;
  return m;
}

EvalReport synthetic(std::int64_t hits, std::int64_t gold) {
  EvalReport r;
  r.hits = hits;
  r.gold_total = gold;
  for (auto c : kAllEmotions) r.per_category[c] = {};
  return r;
}

}  // namespace

TEST_CASE("emotion categories") {
  CHECK(kAllEmotions.size() == 5);
  for (auto c : kAllEmotions) CHECK(parse_emotion(to_string(c)) == c);
  CHECK_FALSE(parse_emotion("surprise"));
  CHECK(set_of({J, F, J}).size() == 2);
  CHECK((set_of({J, F}) & set_of({F, S})) == set_of({F}));
  CHECK(set_of({S, J}).members() == std::vector<EmotionCategory>{J, S});
}

TEST_CASE("map_to_categories") {
  const auto& e = st::shipped_ethogram();
  CHECK(map_to_categories({label("A-6"), label("A-97")}, e) == set_of({J}));
  CHECK(map_to_categories({label("A-9"), label("A-2")}, e) == set_of({F, S}));
  CHECK(map_to_categories({}, e).empty());
  CHECK(map_to_categories({label("32")}, e) == set_of({J}));
  CHECK_THROWS_AS(map_to_categories({label("A-999")}, e), UnknownIdError);
}

TEST_CASE("partial_overlap examples") {
  const std::vector<CategoryCase> perfect = {{set_of({J}), set_of({J})}, {set_of({F, S}), set_of({F, S})}};
  CHECK(partial_overlap(perfect) == Rational(1));
  const std::vector<CategoryCase> empty_pred = {{set_of({J}), {}}, {set_of({F, S}), {}}};
  CHECK(partial_overlap(empty_pred) == Rational(0));
  const std::vector<CategoryCase> two = {{set_of({J}), set_of({J})}, {set_of({F, S}), set_of({F})}};
  CHECK(partial_overlap(two) == Rational(2, 3));
  CHECK(to_double(partial_overlap(two)) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(to_decimal(partial_overlap(two), 4) == "0.6667");
  CHECK_THROWS_AS(partial_overlap(std::vector<CategoryCase>{}), ZeroGold);
  CHECK_THROWS_AS(partial_overlap(std::vector<CategoryCase>{{{}, set_of({J})}}), ZeroGold);
  CHECK_THROWS_AS(partial_overlap_serial(std::vector<CategoryCase>{}), ZeroGold);
}

TEST_CASE("property: brute-force oracle, bounds and permutation invariance") {
  std::mt19937 rng(31337);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    auto m = random_memberships(rng, n);
    const auto [num, den] = oracle(m);
    auto cases = to_cases(m);
    const auto po = partial_overlap(cases);
    REQUIRE(po == Rational(num, den));
    REQUIRE(po >= Rational(0));
    REQUIRE(po <= Rational(1));
    REQUIRE(partial_overlap_serial(cases) == po);
    std::shuffle(cases.begin(), cases.end(), rng);
    REQUIRE(partial_overlap(cases) == po);
  }
}

TEST_CASE("property: monotonicity") {
  std::mt19937 rng(77);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
    auto m = random_memberships(rng, n);
    const auto before = partial_overlap(to_cases(m));
    const auto i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const auto k = std::uniform_int_distribution<int>(0, 4)(rng);
    if (m[i].pred[k]) continue;
    m[i].pred[k] = true;
    const auto after = partial_overlap(to_cases(m));
    if (m[i].gold[k]) {
      REQUIRE(after > before);
    } else {
      REQUIRE(after == before);
    }
  }
}

TEST_CASE("parallel reduction agrees with the serial reference") {
  std::mt19937 rng(2);
  for (std::size_t n : {4095u, 4096u, 50000u}) {
    const auto cases = to_cases(random_memberships(rng, n));
    CHECK(partial_overlap(cases) == partial_overlap_serial(cases));
  }
}

TEST_CASE("latency_stats uses nearest rank") {
  std::vector<double> s;
  for (int i = 20; i >= 1; --i) s.push_back(i);
  const auto l = latency_stats(s);
  CHECK(l.samples == 20);
  CHECK(l.mean == doctest::Approx(10.5));
  CHECK(l.p50 == 10);
  CHECK(l.p95 == 19);
  const auto one = latency_stats({0.7});
  CHECK(one.p50 == 0.7);
  CHECK(one.p95 == 0.7);
  CHECK(latency_stats({}).samples == 0);
}

TEST_CASE("evaluate") {
  const auto& e = st::shipped_ethogram();
  const std::vector<EvalCase> perfect = {{"t", {label("A-6")}, {label("A-97")}}};
  const auto r1 = evaluate(perfect, e);
  CHECK(r1.partial_overlap() == Rational(1));
  CHECK(r1.hits == 1);

  const std::vector<EvalCase> two = {
      {"a", {label("A-6")}, {label("A-6")}},
      {"b", {label("A-9"), label("A-2")}, {label("D-1")}},
  };
  const std::vector<CaseUsage> usage = {{0.3, 1000, 50, Rational(33, 1000)},
                                        {0.5, 1200, 40, Rational(384, 10000)}};
  const auto r2 = evaluate(two, e, usage);
  CHECK(r2.partial_overlap() == Rational(2, 3));
  CHECK(r2.n_cases == 2);
  CHECK(r2.per_category.size() == 5);
  CHECK(r2.per_category.at(J) == CategoryTally{1, 1});
  CHECK(r2.per_category.at(F) == CategoryTally{1, 1});
  CHECK(r2.per_category.at(S) == CategoryTally{1, 0});
  CHECK(r2.latency.samples == 2);
  CHECK(r2.latency.mean == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r2.cost.tokens_in == 2200);
  CHECK(r2.cost.tokens_out == 90);
  CHECK(r2.cost.amount == Rational(714, 10000));
  CHECK(r2.warnings.empty());

  const std::vector<EvalCase> bad_pred = {{"a", {label("A-6")}, {label("Q-1"), label("A-6")}}};
  const auto r3 = evaluate(bad_pred, e);
  CHECK(r3.partial_overlap() == Rational(1));
  REQUIRE(r3.warnings.size() == 1);
  CHECK(r3.warnings[0].find("Q-1") != std::string::npos);

  const std::vector<EvalCase> bad_gold = {{"a", {label("A-6")}, {}}, {"b", {label("Q-1")}, {}}};
  try {
    evaluate(bad_gold, e);
    FAIL("expected EvalCaseError");
  } catch (const EvalCaseError& err) {
    CHECK(err.index() == 1);
  }

  const std::vector<EvalCase> no_gold = {{"a", {}, {label("A-6")}}};
  const auto r4 = evaluate(no_gold, e);
  CHECK_FALSE(r4.defined());
  CHECK(r4.partial_overlap() == Rational(0));
  CHECK(report_table(r4).rfind("partial_overlap: undefined", 0) == 0);
  CHECK_THROWS(evaluate(two, e, std::vector<CaseUsage>{{}}));
}

TEST_CASE("report table and json") {
  const auto r = synthetic(131, 200);
  CHECK(report_table(r).rfind("partial_overlap: 0.6550 (131/200)\n", 0) == 0);
  const auto j = report_to_json(r);
  CHECK(j["partial_overlap_exact"] == "131/200");
  CHECK(j["partial_overlap"].get<double>() == doctest::Approx(0.655).epsilon(1e-12));
  const auto back = report_from_json(j);
  CHECK(back.hits == 131);
  CHECK(back.gold_total == 200);
  CHECK(report_to_json(back) == j);
  CHECK_THROWS(report_from_json(Json::object()));
  auto broken = j;
  broken["hits"] = 500;
  CHECK_THROWS(report_from_json(broken));
}

TEST_CASE("compare_reports") {
  const auto a = synthetic(131, 200);
  const auto b = synthetic(251, 500);
  const auto same = compare_reports(a, a);
  CHECK(same.find("partial_overlap         0.6550      0.6550      0.0000") != std::string::npos);
  CHECK(same.find("latency_mean_s          0.0000      0.0000      0.0000") != std::string::npos);
  const auto t = compare_reports(a, b, "gpt4-cot", "finetuned");
  CHECK(t.find("partial_overlap         0.6550      0.5020     -0.1530") != std::string::npos);
  CHECK(t.rfind("metric", 0) == 0);
  CHECK(t.find("gpt4-cot") != std::string::npos);
  CHECK_THROWS_AS(compare_reports(synthetic(0, 0), synthetic(0, 0)), ZeroGold);
  CHECK_THROWS_AS(compare_reports(a, synthetic(0, 0)), ZeroGold);
}
