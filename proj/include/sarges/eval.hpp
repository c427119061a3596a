#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarges/jsonio.hpp"

#include "sarges/annotation.hpp"
#include "sarges/emotion.hpp"
#include "sarges/ethogram.hpp"
#include "sarges/rational.hpp"

namespace sarges {

class ZeroGold : public Error {
 public:
  ZeroGold() : Error("partial overlap undefined: gold label sets are all empty") {}
};

/// Distinct emotion categories of the referenced entries. Throws
/// UnknownIdError for ids missing from `e`.
CategorySet map_to_categories(const std::vector<GestureLabel>& labels, const Ethogram& e);

struct CategoryCase {
  CategorySet gold;
  CategorySet predicted;
};

/// Σ|pred ∩ gold| / Σ|gold| as an exact fraction. Throws ZeroGold.
/// Reduces over an OpenMP team for large inputs.
Rational partial_overlap(std::span<const CategoryCase> cases);
/// Single-threaded reference for partial_overlap.
Rational partial_overlap_serial(std::span<const CategoryCase> cases);

struct EvalCase {
  std::string text;
  std::vector<GestureLabel> gold;
  std::vector<GestureLabel> predicted;
};

struct CaseUsage {
  double seconds = 0.0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  Rational cost{0};
};

struct CategoryTally {
  std::size_t gold_count = 0;
  std::size_t hit_count = 0;
  friend bool operator==(const CategoryTally&, const CategoryTally&) = default;
};

struct LatencyStats {
  std::size_t samples = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

struct CostStats {
  std::int64_t tokens_in = 0;
  std::int64_t tokens_out = 0;
  Rational amount{0};
  std::string currency = "USD";
};

struct EvalReport {
  std::int64_t hits = 0;
  std::int64_t gold_total = 0;
  std::map<EmotionCategory, CategoryTally> per_category;
  std::size_t n_cases = 0;
  LatencyStats latency;
  CostStats cost;
  std::vector<std::string> warnings;

  bool defined() const { return gold_total > 0; }
  /// hits/gold_total; 0 when no gold labels exist.
  Rational partial_overlap() const;
};

class EvalCaseError : public Error {
 public:
  EvalCaseError(std::size_t index, const std::string& what)
      : Error("case " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Nearest-rank latency percentiles.
LatencyStats latency_stats(std::vector<double> seconds);

/// Gold ids must resolve (EvalCaseError otherwise); unresolved predicted ids
/// score as misses and are listed in warnings. `usage` is empty or one entry
/// per case.
EvalReport evaluate(std::span<const EvalCase> cases, const Ethogram& e,
                    std::span<const CaseUsage> usage = {}, std::string currency = "USD");

Json report_to_json(const EvalReport& r);
EvalReport report_from_json(const Json& j);
std::string report_table(const EvalReport& r);

/// Side-by-side table with `b - a` deltas. Throws ZeroGold if either report
/// has no gold labels.
std::string compare_reports(const EvalReport& a, const EvalReport& b,
                            const std::string& name_a = "A", const std::string& name_b = "B");

}  // namespace sarges
