#include "sarges/ethogram.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <json.hpp>

#include "sarges/sidecar.hpp"
#include "sarges/utf8.hpp"

namespace sarges {
namespace {

using nlohmann::json;

std::string entry_locus(std::size_t index, const GestureEntry& e) {
  return "entry " + std::to_string(index + 1) + " (" + e.id.canonical() + ")";
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

std::optional<int> parse_positive(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || v <= 0) return std::nullopt;
  return v;
}

const std::string& require_string(const json& j, const char* key, const std::string& locus) {
  auto it = j.find(key);
  if (it == j.end()) throw EthogramError(locus + ": missing key '" + key + "'");
  if (!it->is_string()) throw EthogramError(locus + ": key '" + key + "' must be a string");
  return it->get_ref<const std::string&>();
}

}  // namespace

std::optional<IntentCategory> intent_from_code(char code) {
  switch (code) {
    case 'A': return IntentCategory::InformationDisplay;
    case 'B': return IntentCategory::ConcreteReinforcement;
    case 'C': return IntentCategory::ToneReinforcement;
    case 'D': return IntentCategory::ComfortBehaviors;
    default: return std::nullopt;
  }
}

std::string_view to_string(IntentCategory c) {
  switch (c) {
    case IntentCategory::InformationDisplay: return "InformationDisplay";
    case IntentCategory::ConcreteReinforcement: return "ConcreteReinforcement";
    case IntentCategory::ToneReinforcement: return "ToneReinforcement";
    case IntentCategory::ComfortBehaviors: return "ComfortBehaviors";
  }
  return "";
}

std::string GestureId::canonical() const {
  return std::string(1, letter) + "-" + std::to_string(ordinal);
}

std::optional<GestureId> GestureId::parse(std::string_view s) {
  if (s.size() < 3 || s[1] != '-') return std::nullopt;
  char letter = s[0];
  if (letter >= 'a' && letter <= 'z') letter = static_cast<char>(letter - 'a' + 'A');
  if (letter < 'A' || letter > 'Z') return std::nullopt;
  auto ordinal = parse_positive(s.substr(2));
  if (!ordinal) return std::nullopt;
  return GestureId{letter, *ordinal};
}

std::vector<GestureEntry> parse_ethogram_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw EthogramError("malformed ethogram document at line " +
                        std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " +
                        e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw EthogramError("ethogram document must be an object with an 'entries' array");
  }
  std::vector<GestureEntry> entries;
  const auto& items = doc["entries"];
  entries.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& j = items[i];
    const std::string locus = "entry " + std::to_string(i + 1);
    if (!j.is_object()) throw EthogramError(locus + ": must be an object");
    GestureEntry e;
    const auto& id = require_string(j, "id", locus);
    auto parsed = GestureId::parse(id);
    if (!parsed) throw EthogramError(locus + ": malformed id '" + id + "'");
    e.id = *parsed;
    e.name = require_string(j, "name", locus);
    e.sub_intent = require_string(j, "sub_intent", locus);
    e.description = require_string(j, "description", locus);
    e.guideline = require_string(j, "guideline", locus);
    const auto& emotion = require_string(j, "emotion", locus);
    auto emo = parse_emotion(emotion);
    if (!emo) throw EthogramError(locus + ": unknown emotion '" + emotion + "'");
    e.emotion = *emo;
    auto kw = j.find("keywords");
    if (kw == j.end()) throw EthogramError(locus + ": missing key 'keywords'");
    if (!kw->is_array()) throw EthogramError(locus + ": key 'keywords' must be an array");
    for (const auto& k : *kw) {
      if (!k.is_string()) throw EthogramError(locus + ": keywords must be strings");
      e.keywords.push_back(utf8::ascii_lower(utf8::trim(k.get<std::string>())));
    }
    if (auto f = j.find("flat_id"); f != j.end()) {
      if (!f->is_number_integer()) throw EthogramError(locus + ": flat_id must be an integer");
      e.flat_id = f->get<int>();
    } else {
      e.flat_id = static_cast<int>(i + 1);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

Diagnostics validate_entries(std::span<const GestureEntry> entries) {
  Diagnostics out;
  auto error = [&](std::string code, std::string locus, std::string msg) {
    out.push_back({Severity::Error, std::move(code), std::move(locus), std::move(msg)});
  };
  if (entries.empty()) {
    error("empty-ethogram", "entries", "ethogram has no entries");
    return out;
  }
  std::set<GestureId> seen_ids;
  std::set<int> seen_flat;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto locus = entry_locus(i, e);
    if (!e.id.intent()) {
      error("unknown-category", locus,
            std::string("unknown intent category '") + e.id.letter + "'");
    }
    if (e.id.ordinal <= 0) error("invalid-ordinal", locus, "ordinal must be positive");
    if (e.name.empty()) error("empty-field", locus, "field 'name' is empty");
    if (e.sub_intent.empty()) error("empty-field", locus, "field 'sub_intent' is empty");
    if (e.description.empty()) error("empty-field", locus, "field 'description' is empty");
    for (const auto& k : e.keywords) {
      if (k.empty() || k != utf8::ascii_lower(utf8::trim(k))) {
        error("invalid-keyword", locus, "keyword '" + k + "' must be non-empty lowercase");
      }
    }
    if (!seen_ids.insert(e.id).second) {
      error("duplicate-id", locus, "duplicate gesture id " + e.id.canonical());
    }
    if (!seen_flat.insert(e.flat_id).second) {
      error("duplicate-flat-id", locus, "duplicate flat_id " + std::to_string(e.flat_id));
    } else if (e.flat_id != static_cast<int>(i + 1)) {
      error("flat-id-sequence", locus,
            "flat_id " + std::to_string(e.flat_id) + " out of sequence (expected " +
                std::to_string(i + 1) + ")");
    }
  }
  return out;
}

Diagnostics validate(const Ethogram& e) { return validate_entries(e.entries()); }

Ethogram Ethogram::build(std::vector<GestureEntry> entries) {
  auto diags = validate_entries(entries);
  if (has_errors(diags)) {
    std::string msg = "invalid ethogram: " + diags.front().locus + ": " + diags.front().message;
    if (diags.size() > 1) msg += " (+" + std::to_string(diags.size() - 1) + " more)";
    throw EthogramError(msg, std::move(diags));
  }
  Ethogram g;
  g.entries_ = std::move(entries);
  for (std::size_t i = 0; i < g.entries_.size(); ++i) {
    const auto& e = g.entries_[i];
    g.by_id_.emplace(e.id.canonical(), i);
    g.by_flat_id_.emplace(e.flat_id, i);
    for (const auto& k : e.keywords) {
      auto& bucket = g.by_keyword_[k];
      if (bucket.empty() || bucket.back() != i) bucket.push_back(i);
    }
  }
  return g;
}

const GestureEntry* Ethogram::find(std::string_view id) const {
  const auto s = utf8::trim(id);
  if (auto flat = parse_positive(s)) {
    auto it = by_flat_id_.find(*flat);
    return it == by_flat_id_.end() ? nullptr : &entries_[it->second];
  }
  auto parsed = GestureId::parse(s);
  if (!parsed) return nullptr;
  auto it = by_id_.find(parsed->canonical());
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

const GestureEntry& Ethogram::lookup(std::string_view id) const {
  if (const auto* e = find(id)) return *e;
  throw UnknownIdError(std::string(id));
}

std::vector<const GestureEntry*> Ethogram::search_by_keyword(std::string_view token) const {
  const auto key = utf8::ascii_lower(utf8::trim(token));
  if (key.empty()) throw std::invalid_argument("search_by_keyword: token must be non-empty");
  std::vector<const GestureEntry*> out;
  if (auto it = by_keyword_.find(key); it != by_keyword_.end()) {
    for (auto i : it->second) out.push_back(&entries_[i]);
  }
  return out;
}

Ethogram load_ethogram(std::string_view text) {
  return Ethogram::build(parse_ethogram_document(text));
}

Ethogram load_ethogram_file(const std::string& path) { return load_ethogram(read_text_file(path)); }

std::string render_ethogram(std::span<const GestureEntry> entries) {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["id"] = e.id.canonical();
    j["flat_id"] = e.flat_id;
    j["name"] = e.name;
    j["sub_intent"] = e.sub_intent;
    j["description"] = e.description;
    j["guideline"] = e.guideline;
    j["keywords"] = e.keywords;
    j["emotion"] = std::string(to_string(e.emotion));
    items.push_back(std::move(j));
  }
  nlohmann::ordered_json doc;
  doc["entries"] = std::move(items);
  return doc.dump(2) + "\n";
}

std::string render_ethogram(const Ethogram& e) { return render_ethogram(e.entries()); }

}  // namespace sarges
