#include "sarges/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <omp.h>

namespace sarges {
namespace {

// Below this many cases the reduction is not worth a thread team.
constexpr std::ptrdiff_t kParallelThreshold = 4096;

std::string fixed(double v, int places) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(places) << v;
  return os.str();
}

std::string rate(const CategoryTally& t) {
  if (t.gold_count == 0) return "-";
  return to_decimal(Rational(static_cast<std::int64_t>(t.hit_count),
                             static_cast<std::int64_t>(t.gold_count)),
                    4);
}

}  // namespace

CategorySet map_to_categories(const std::vector<GestureLabel>& labels, const Ethogram& e) {
  CategorySet s;
  for (const auto& l : labels) s.insert(e.lookup(l.gesture_id).emotion);
  return s;
}

Rational partial_overlap(std::span<const CategoryCase> cases) {
  std::int64_t hits = 0;
  std::int64_t gold = 0;
  const auto n = static_cast<std::ptrdiff_t>(cases.size());
#pragma omp parallel for reduction(+ : hits, gold) if (n >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& c = cases[static_cast<std::size_t>(i)];
    hits += (c.gold & c.predicted).size();
    gold += c.gold.size();
  }
  if (gold == 0) throw ZeroGold();
  return Rational(hits, gold);
}

Rational partial_overlap_serial(std::span<const CategoryCase> cases) {
  std::int64_t hits = 0;
  std::int64_t gold = 0;
  for (const auto& c : cases) {
    hits += (c.gold & c.predicted).size();
    gold += c.gold.size();
  }
  if (gold == 0) throw ZeroGold();
  return Rational(hits, gold);
}

Rational EvalReport::partial_overlap() const {
  return gold_total == 0 ? Rational(0) : Rational(hits, gold_total);
}

LatencyStats latency_stats(std::vector<double> seconds) {
  LatencyStats s;
  s.samples = seconds.size();
  if (seconds.empty()) return s;
  std::sort(seconds.begin(), seconds.end());
  s.mean = std::accumulate(seconds.begin(), seconds.end(), 0.0) / static_cast<double>(seconds.size());
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(seconds.size())));
    return seconds[std::clamp<std::size_t>(k, 1, seconds.size()) - 1];
  };
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  return s;
}

EvalReport evaluate(std::span<const EvalCase> cases, const Ethogram& e,
                    std::span<const CaseUsage> usage, std::string currency) {
  if (!usage.empty() && usage.size() != cases.size()) {
    throw Error("usage records (" + std::to_string(usage.size()) + ") do not match cases (" +
                std::to_string(cases.size()) + ")");
  }
  EvalReport r;
  r.n_cases = cases.size();
  for (auto c : kAllEmotions) r.per_category[c] = {};

  for (std::size_t i = 0; i < cases.size(); ++i) {
    CategoryCase cc;
    try {
      cc.gold = map_to_categories(cases[i].gold, e);
    } catch (const UnknownIdError& ex) {
      throw EvalCaseError(i, std::string("gold ") + ex.what());
    }
    for (const auto& l : cases[i].predicted) {
      if (const auto* entry = e.find(l.gesture_id)) {
        cc.predicted.insert(entry->emotion);
      } else {
        r.warnings.push_back("case " + std::to_string(i) + ": predicted id '" + l.gesture_id +
                             "' is not in the ethogram; scored as a miss");
      }
    }
    for (auto c : cc.gold.members()) {
      auto& t = r.per_category[c];
      ++t.gold_count;
      if (cc.predicted.contains(c)) ++t.hit_count;
    }
    r.hits += (cc.gold & cc.predicted).size();
    r.gold_total += cc.gold.size();
  }

  std::vector<double> seconds;
  r.cost.currency = std::move(currency);
  for (const auto& u : usage) {
    seconds.push_back(u.seconds);
    r.cost.tokens_in += u.prompt_tokens;
    r.cost.tokens_out += u.completion_tokens;
    r.cost.amount += u.cost;
  }
  r.latency = latency_stats(std::move(seconds));
  return r;
}

Json report_to_json(const EvalReport& r) {
  Json j;
  if (r.defined()) {
    j["partial_overlap"] = to_double(r.partial_overlap());
    j["partial_overlap_exact"] = to_string(r.partial_overlap());
  } else {
    j["partial_overlap"] = nullptr;
    j["partial_overlap_exact"] = nullptr;
  }
  j["hits"] = r.hits;
  j["gold_total"] = r.gold_total;
  j["n_cases"] = r.n_cases;
  Json per = Json::object();
  for (const auto& [c, t] : r.per_category) {
    per[std::string(to_string(c))] = {{"gold_count", t.gold_count}, {"hit_count", t.hit_count}};
  }
  j["per_category"] = std::move(per);
  j["latency"] = {{"samples", r.latency.samples},
                  {"mean", r.latency.mean},
                  {"p50", r.latency.p50},
                  {"p95", r.latency.p95}};
  j["cost"] = {{"tokens_in", r.cost.tokens_in},
               {"tokens_out", r.cost.tokens_out},
               {"amount", to_string(r.cost.amount)},
               {"currency", r.cost.currency}};
  j["warnings"] = r.warnings;
  return j;
}

EvalReport report_from_json(const Json& j) {
  EvalReport r;
  try {
    r.hits = j.at("hits").get<std::int64_t>();
    r.gold_total = j.at("gold_total").get<std::int64_t>();
    r.n_cases = j.at("n_cases").get<std::size_t>();
    for (auto c : kAllEmotions) r.per_category[c] = {};
    for (const auto& [name, t] : j.at("per_category").items()) {
      auto c = parse_emotion(name);
      if (!c) throw Error("unknown category '" + name + "' in report");
      r.per_category[*c] = {t.at("gold_count").get<std::size_t>(),
                            t.at("hit_count").get<std::size_t>()};
    }
    const auto& lat = j.at("latency");
    r.latency = {lat.at("samples").get<std::size_t>(), lat.at("mean").get<double>(),
                 lat.at("p50").get<double>(), lat.at("p95").get<double>()};
    const auto& cost = j.at("cost");
    r.cost.tokens_in = cost.at("tokens_in").get<std::int64_t>();
    r.cost.tokens_out = cost.at("tokens_out").get<std::int64_t>();
    r.cost.amount = parse_rational(cost.at("amount").get<std::string>());
    r.cost.currency = cost.at("currency").get<std::string>();
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed eval report: ") + e.what());
  }
  if (r.hits < 0 || r.gold_total < 0 || r.hits > r.gold_total) {
    throw Error("malformed eval report: hits must lie in [0, gold_total]");
  }
  return r;
}

std::string report_table(const EvalReport& r) {
  std::ostringstream os;
  if (r.defined()) {
    os << "partial_overlap: " << to_decimal(r.partial_overlap(), 4) << " (" << r.hits << "/"
       << r.gold_total << ")\n";
  } else {
    os << "partial_overlap: undefined (no gold labels)\n";
  }
  os << "cases: " << r.n_cases << "\n";
  os << std::left << std::setw(10) << "category" << std::right << std::setw(8) << "gold"
     << std::setw(8) << "hits" << std::setw(10) << "rate" << "\n";
  for (const auto& [c, t] : r.per_category) {
    os << std::left << std::setw(10) << to_string(c) << std::right << std::setw(8) << t.gold_count
       << std::setw(8) << t.hit_count << std::setw(10) << rate(t) << "\n";
  }
  os << "latency_s: mean " << fixed(r.latency.mean, 4) << "  p50 " << fixed(r.latency.p50, 4)
     << "  p95 " << fixed(r.latency.p95, 4) << "  (" << r.latency.samples << " samples)\n";
  os << "cost: " << to_decimal(r.cost.amount, 4) << " " << r.cost.currency << "  (tokens in "
     << r.cost.tokens_in << ", out " << r.cost.tokens_out << ")\n";
  return os.str();
}

std::string compare_reports(const EvalReport& a, const EvalReport& b, const std::string& name_a,
                            const std::string& name_b) {
  if (!a.defined() || !b.defined()) throw ZeroGold();
  std::ostringstream os;
  auto row = [&](const std::string& metric, const std::string& va, const std::string& vb,
                 const std::string& delta) {
    os << std::left << std::setw(18) << metric << std::right << std::setw(12) << va
       << std::setw(12) << vb << std::setw(12) << delta << "\n";
  };
  row("metric", name_a, name_b, "delta");
  const auto pa = a.partial_overlap();
  const auto pb = b.partial_overlap();
  row("partial_overlap", to_decimal(pa, 4), to_decimal(pb, 4), to_decimal(pb - pa, 4));
  for (auto c : kAllEmotions) {
    const auto& ta = a.per_category.count(c) ? a.per_category.at(c) : CategoryTally{};
    const auto& tb = b.per_category.count(c) ? b.per_category.at(c) : CategoryTally{};
    std::string delta = "-";
    if (ta.gold_count && tb.gold_count) {
      delta = to_decimal(Rational(static_cast<std::int64_t>(tb.hit_count),
                                  static_cast<std::int64_t>(tb.gold_count)) -
                             Rational(static_cast<std::int64_t>(ta.hit_count),
                                      static_cast<std::int64_t>(ta.gold_count)),
                         4);
    }
    row(std::string(to_string(c)), rate(ta), rate(tb), delta);
  }
  row("latency_mean_s", fixed(a.latency.mean, 4), fixed(b.latency.mean, 4),
      fixed(b.latency.mean - a.latency.mean, 4));
  row("cost", to_decimal(a.cost.amount, 4), to_decimal(b.cost.amount, 4),
      to_decimal(b.cost.amount - a.cost.amount, 4));
  return os.str();
}

}  // namespace sarges
