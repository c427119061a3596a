#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sarges/diagnostic.hpp"
#include "sarges/emotion.hpp"
#include "sarges/error.hpp"

namespace sarges {

/// Top layer of the taxonomy. Codes are fixed: A..D in table order.
enum class IntentCategory : char {
  InformationDisplay = 'A',
  ConcreteReinforcement = 'B',
  ToneReinforcement = 'C',
  ComfortBehaviors = 'D',
};

std::optional<IntentCategory> intent_from_code(char code);
std::string_view to_string(IntentCategory c);
inline char code_of(IntentCategory c) { return static_cast<char>(c); }

/// `<letter>-<ordinal>`, e.g. "A-15". The letter is kept raw so that a
/// document with an unknown category can still be loaded far enough to be
/// diagnosed; `intent()` is only meaningful after validation.
struct GestureId {
  char letter = 'A';
  int ordinal = 1;

  std::optional<IntentCategory> intent() const { return intent_from_code(letter); }
  std::string canonical() const;

  /// Parses the canonical form only. Returns nullopt on anything else.
  static std::optional<GestureId> parse(std::string_view s);

  friend auto operator<=>(const GestureId&, const GestureId&) = default;
};

struct GestureEntry {
  GestureId id;
  std::string name;
  std::string sub_intent;
  std::string description;
  std::string guideline;
  std::vector<std::string> keywords;  // lowercase phrases
  EmotionCategory emotion = EmotionCategory::Special;
  int flat_id = 0;

  friend bool operator==(const GestureEntry&, const GestureEntry&) = default;
};

class EthogramError : public Error {
 public:
  EthogramError(const std::string& what, Diagnostics diags = {})
      : Error(what), diagnostics_(std::move(diags)) {}
  const Diagnostics& diagnostics() const { return diagnostics_; }

 private:
  Diagnostics diagnostics_;
};

class UnknownIdError : public Error {
 public:
  explicit UnknownIdError(std::string id)
      : Error("unknown gesture id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Validated, immutable gesture catalogue. Construct through load_ethogram()
/// or Ethogram::build(); both reject anything validate_entries() flags.
class Ethogram {
 public:
  static Ethogram build(std::vector<GestureEntry> entries);

  std::span<const GestureEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Accepts "D-2" or bare flat ids such as "97".
  const GestureEntry& lookup(std::string_view id) const;
  const GestureEntry* find(std::string_view id) const;

  /// Case-insensitive whole-phrase keyword match, results in flat_id order.
  std::vector<const GestureEntry*> search_by_keyword(std::string_view token) const;

  friend bool operator==(const Ethogram& a, const Ethogram& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Ethogram() = default;

  std::vector<GestureEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<int, std::size_t> by_flat_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_keyword_;
};

/// Parses an ethogram document without validating it. Flat ids missing from
/// the document are filled in by position. Throws EthogramError for syntax
/// problems (bad JSON, wrong types, unparseable id strings, unknown emotion).
std::vector<GestureEntry> parse_ethogram_document(std::string_view text);

Diagnostics validate_entries(std::span<const GestureEntry> entries);
Diagnostics validate(const Ethogram& e);

Ethogram load_ethogram(std::string_view text);
Ethogram load_ethogram_file(const std::string& path);
std::string render_ethogram(const Ethogram& e);
std::string render_ethogram(std::span<const GestureEntry> entries);

}  // namespace sarges
