#include "sarges/annotation.hpp"

#include <algorithm>

#include "sarges/ethogram.hpp"
#include "sarges/utf8.hpp"

namespace sarges {
namespace {

char32_t lower(char32_t c) { return (c >= U'A' && c <= U'Z') ? c - U'A' + U'a' : c; }

std::size_t skip_spaces(std::u32string_view s, std::size_t i) {
  while (i < s.size() && utf8::is_space(s[i])) ++i;
  return i;
}

// Case-insensitive ASCII keyword match at i.
bool match_word(std::u32string_view s, std::size_t i, std::u32string_view word) {
  if (i + word.size() > s.size()) return false;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (lower(s[i + k]) != word[k]) return false;
  }
  return true;
}

// If s[i] opens a marker ("(" ws* "id" ws* ":"), returns the index just past
// the colon.
std::optional<std::size_t> marker_head(std::u32string_view s, std::size_t i) {
  if (s[i] != U'(') return std::nullopt;
  std::size_t j = skip_spaces(s, i + 1);
  if (!match_word(s, j, U"id")) return std::nullopt;
  j = skip_spaces(s, j + 2);
  if (j >= s.size() || s[j] != U':') return std::nullopt;
  return j + 1;
}

bool has_marker_syntax(std::u32string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (marker_head(s, i)) return true;
  }
  return false;
}

bool id_char(char32_t c) {
  return !utf8::is_space(c) && c != U',' && c != U':' && c != U')' && c != U'(';
}

bool balanced(std::u32string_view s) {
  int depth = 0;
  for (char32_t c : s) {
    if (c == U'(') ++depth;
    if (c == U')' && --depth < 0) return false;
  }
  return depth == 0;
}

struct Marker {
  std::string id;
  std::string description;
  std::size_t end;  // one past ')'
};

class MarkerReader {
 public:
  MarkerReader(std::string_view bytes, std::u32string_view cps) : bytes_(bytes), s_(cps) {}

  Marker read(std::size_t open, std::size_t after_colon) const {
    std::size_t i = skip_spaces(s_, after_colon);
    const std::size_t id_start = i;
    while (i < s_.size() && id_char(s_[i])) ++i;
    if (i == id_start) fail("missing gesture id in marker", open);
    Marker m;
    m.id = utf8::encode(s_.substr(id_start, i - id_start));
    i = skip_spaces(s_, i);
    if (i >= s_.size()) fail("unclosed marker", open);
    if (s_[i] == U')') {
      m.end = i + 1;
      return m;
    }
    if (s_[i] == U',') {
      i = skip_spaces(s_, i + 1);
      if (match_word(s_, i, U"description")) {
        std::size_t j = skip_spaces(s_, i + 11);
        if (j < s_.size() && s_[j] == U':') i = j + 1;
      }
    } else if (s_[i] == U':') {
      ++i;
    } else {
      fail("unexpected character after gesture id", i);
    }
    i = skip_spaces(s_, i);
    const std::size_t desc_start = i;
    int depth = 0;
    for (; i < s_.size(); ++i) {
      if (s_[i] == U'(') {
        ++depth;
      } else if (s_[i] == U')') {
        if (depth == 0) break;
        --depth;
      }
    }
    if (i >= s_.size()) fail("unclosed marker", open);
    m.description = utf8::trim(utf8::encode(s_.substr(desc_start, i - desc_start)));
    m.end = i + 1;
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw MalformedMarker(what, utf8::byte_offset(bytes_, at), at);
  }

  std::string_view bytes_;
  std::u32string_view s_;
};

bool joiner(char32_t c) { return c == U'\'' || c == U'-' || c == 0x2019; }

}  // namespace

std::size_t token_duration(std::u32string_view clean, std::size_t start) {
  std::size_t i = start;
  while (i < clean.size()) {
    if (utf8::is_word(clean[i])) {
      ++i;
    } else if (joiner(clean[i]) && i > start && i + 1 < clean.size() &&
               utf8::is_word(clean[i + 1])) {
      ++i;
    } else {
      break;
    }
  }
  return std::max<std::size_t>(1, i - start);
}

std::size_t token_duration(std::string_view clean_utf8, std::size_t start) {
  return token_duration(utf8::decode(clean_utf8), start);
}

void check_invariants(const AnnotatedText& a) {
  const auto cps = utf8::decode(a.clean_text);
  if (has_marker_syntax(cps)) throw OverlappingLabels("clean text contains marker syntax");
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const auto& l = a.labels[i];
    if (l.duration_chars == 0) {
      throw OverlappingLabels("label " + std::to_string(i) + " has zero duration");
    }
    if (l.start_char + l.duration_chars > cps.size()) {
      throw OverlappingLabels("label " + std::to_string(i) + " extends past the clean text");
    }
    if (i > 0 && l.start_char <= a.labels[i - 1].start_char) {
      throw OverlappingLabels("label " + std::to_string(i) +
                              " does not start strictly after the previous label");
    }
  }
}

AnnotatedText make_annotated(std::string clean_text, std::vector<GestureLabel> labels) {
  std::stable_sort(labels.begin(), labels.end(),
                   [](const auto& x, const auto& y) { return x.start_char < y.start_char; });
  labels.erase(std::unique(labels.begin(), labels.end(),
                           [](const auto& x, const auto& y) { return x.start_char == y.start_char; }),
               labels.end());
  AnnotatedText a{std::move(clean_text), std::move(labels)};
  check_invariants(a);
  return a;
}

AnnotatedText parse_inline(std::string_view text, std::vector<ParseWarning>* warnings) {
  const auto s = utf8::decode(text);
  const MarkerReader reader(text, s);
  std::u32string clean;
  clean.reserve(s.size());
  struct Pending {
    Marker marker;
    std::size_t start;
    std::size_t source;
  };
  std::vector<Pending> pending;

  std::size_t i = 0;
  while (i < s.size()) {
    auto head = marker_head(s, i);
    if (!head) {
      clean.push_back(s[i++]);
      continue;
    }
    Marker m = reader.read(i, *head);
    std::size_t next = m.end;
    if (next < s.size() && utf8::is_space(s[next])) ++next;
    if (next >= s.size()) {
      // Text-final: anchor to the last character instead of past the end.
      if (!clean.empty() && utf8::is_space(clean.back())) clean.pop_back();
      if (clean.empty()) {
        throw MalformedMarker("marker has no text to anchor to", utf8::byte_offset(text, i), i);
      }
      pending.push_back({std::move(m), clean.size() - 1, i});
    } else {
      pending.push_back({std::move(m), clean.size(), i});
    }
    i = next;
  }

  AnnotatedText out;
  out.clean_text = utf8::encode(clean);
  for (auto& p : pending) {
    if (p.start >= clean.size()) p.start = clean.size() - 1;
    if (!out.labels.empty() && p.start <= out.labels.back().start_char) {
      if (warnings) {
        warnings->push_back({p.source, "marker for '" + p.marker.id +
                                           "' shares a position with an earlier marker; dropped"});
      }
      continue;
    }
    GestureLabel l;
    l.gesture_id = std::move(p.marker.id);
    l.description = std::move(p.marker.description);
    l.start_char = p.start;
    l.duration_chars = token_duration(clean, p.start);
    out.labels.push_back(std::move(l));
  }
  return out;
}

std::string render_inline(const AnnotatedText& a) {
  check_invariants(a);
  const auto cps = utf8::decode(a.clean_text);
  std::string out;
  out.reserve(a.clean_text.size() + a.labels.size() * 40);
  std::size_t prev = 0;
  for (std::size_t k = 0; k < a.labels.size(); ++k) {
    const auto& l = a.labels[k];
    const auto id = utf8::decode(l.gesture_id);
    if (id.empty() || !std::all_of(id.begin(), id.end(), id_char)) {
      throw Error("label " + std::to_string(k) + ": gesture id '" + l.gesture_id +
                  "' cannot be written inline");
    }
    const auto desc = utf8::decode(l.description);
    if (!balanced(desc) || utf8::trim(l.description) != l.description) {
      throw Error("label " + std::to_string(k) + ": description '" + l.description +
                  "' cannot be written inline");
    }
    out += utf8::encode(std::u32string_view(cps).substr(prev, l.start_char - prev));
    out += "(id: " + l.gesture_id;
    if (!l.description.empty()) out += ", description: " + l.description;
    out += ") ";
    prev = l.start_char;
  }
  out += utf8::encode(std::u32string_view(cps).substr(prev));
  return out;
}

std::vector<SentenceSpan> split_sentences(std::u32string_view s) {
  const auto ascii_term = [](char32_t c) { return c == U'.' || c == U'!' || c == U'?'; };
  const auto wide_term = [](char32_t c) { return c == 0x3002 || c == 0xFF01 || c == 0xFF1F; };
  std::vector<SentenceSpan> spans;
  std::size_t i = skip_spaces(s, 0);
  while (i < s.size()) {
    const std::size_t start = i;
    std::size_t end = s.size();
    for (; i < s.size(); ++i) {
      const bool at_break = i + 1 == s.size() || utf8::is_space(s[i + 1]);
      if (wide_term(s[i]) || (ascii_term(s[i]) && at_break)) {
        // Absorb a run of wide terminators such as "！？".
        while (i + 1 < s.size() && wide_term(s[i + 1])) ++i;
        end = i + 1;
        break;
      }
    }
    if (end == s.size()) {
      while (end > start && utf8::is_space(s[end - 1])) --end;
    }
    spans.push_back({start, end});
    i = skip_spaces(s, end);
  }
  return spans;
}

std::vector<SentenceSpan> split_sentences(std::string_view text) {
  return split_sentences(utf8::decode(text));
}

std::size_t sentence_of(const std::vector<SentenceSpan>& spans, std::size_t pos) {
  auto it = std::upper_bound(spans.begin(), spans.end(), pos,
                             [](std::size_t p, const SentenceSpan& sp) { return p < sp.end_char; });
  if (it == spans.end()) return spans.size() - 1;
  return static_cast<std::size_t>(it - spans.begin());
}

Diagnostics validate_labels(const AnnotatedText& a, const Ethogram& e) {
  Diagnostics out;
  const auto len = utf8::length(a.clean_text);
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const auto& l = a.labels[i];
    const std::string locus = "label " + std::to_string(i) + " (" + l.gesture_id + ")";
    if (l.duration_chars == 0 || l.start_char + l.duration_chars > len) {
      out.push_back({Severity::Error, "out-of-range", locus,
                     "span [" + std::to_string(l.start_char) + ", " +
                         std::to_string(l.start_char + l.duration_chars) +
                         ") exceeds clean text length " + std::to_string(len)});
    }
    if (i > 0 && l.start_char <= a.labels[i - 1].start_char) {
      out.push_back({Severity::Error, "unordered", locus,
                     "label does not start after the previous label"});
    }
    const auto* entry = e.find(l.gesture_id);
    if (!entry) {
      out.push_back({Severity::Error, "unresolved-id", locus,
                     "gesture id '" + l.gesture_id + "' is not in the ethogram"});
      continue;
    }
    if (!l.description.empty() &&
        utf8::ascii_lower(utf8::trim(l.description)) != utf8::ascii_lower(entry->name)) {
      out.push_back({Severity::Warning, "description-mismatch", locus,
                     "description '" + l.description + "' differs from ethogram name '" +
                         entry->name + "'"});
    }
  }
  return out;
}

AnnotatedText resolve_labels(AnnotatedText a, const Ethogram& e) {
  for (auto& l : a.labels) l.resolved = e.find(l.gesture_id) != nullptr;
  return a;
}

}  // namespace sarges
