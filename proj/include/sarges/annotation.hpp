#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sarges/diagnostic.hpp"
#include "sarges/error.hpp"

namespace sarges {

class Ethogram;

/// One placed gesture. Positions and extents count Unicode code points of
/// the clean text.
struct GestureLabel {
  std::string gesture_id;  // as written: "A-97" or a flat alias like "9"
  std::string description;
  std::size_t start_char = 0;
  std::size_t duration_chars = 1;
  /// Unset until resolve_labels() has looked the id up in an ethogram.
  std::optional<bool> resolved;

  friend bool operator==(const GestureLabel&, const GestureLabel&) = default;
};

struct AnnotatedText {
  std::string clean_text;
  std::vector<GestureLabel> labels;  // strictly increasing start_char

  friend bool operator==(const AnnotatedText&, const AnnotatedText&) = default;
};

struct SentenceSpan {
  std::size_t start_char = 0;
  std::size_t end_char = 0;  // exclusive

  bool contains(std::size_t pos) const { return pos >= start_char && pos < end_char; }
  friend bool operator==(const SentenceSpan&, const SentenceSpan&) = default;
};

class MalformedMarker : public Error {
 public:
  MalformedMarker(const std::string& what, std::size_t byte_offset, std::size_t char_offset)
      : Error(what + " at byte " + std::to_string(byte_offset) + " (char " +
              std::to_string(char_offset) + ")"),
        byte_offset_(byte_offset),
        char_offset_(char_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }
  std::size_t char_offset() const { return char_offset_; }

 private:
  std::size_t byte_offset_;
  std::size_t char_offset_;
};

class OverlappingLabels : public Error {
 public:
  using Error::Error;
};

/// Throws OverlappingLabels unless labels are strictly increasing by start,
/// fit inside the clean text and have positive duration.
void check_invariants(const AnnotatedText& a);

/// Sorts labels by start and drops later-listed labels that share a start.
AnnotatedText make_annotated(std::string clean_text, std::vector<GestureLabel> labels);

/// Length of the word token beginning at `start`, at least 1.
std::size_t token_duration(std::u32string_view clean, std::size_t start);
std::size_t token_duration(std::string_view clean_utf8, std::size_t start);

struct ParseWarning {
  std::size_t char_offset;
  std::string message;
};

/// Strips `(id: X, description: Y)`, `(id: X: Y)` and `(id: X)` markers.
/// A marker swallows one whitespace character that follows it; a text-final
/// marker swallows one that precedes it and anchors to the last character.
AnnotatedText parse_inline(std::string_view text, std::vector<ParseWarning>* warnings = nullptr);

/// Inverse of parse_inline. Always emits `(id: X, description: Y) ` before
/// each label start.
std::string render_inline(const AnnotatedText& a);

std::vector<SentenceSpan> split_sentences(std::string_view text);
std::vector<SentenceSpan> split_sentences(std::u32string_view text);

/// Index of the sentence owning `pos`: the span containing it, else the
/// first span after it (or the last span). Requires non-empty spans.
std::size_t sentence_of(const std::vector<SentenceSpan>& spans, std::size_t pos);

Diagnostics validate_labels(const AnnotatedText& a, const Ethogram& e);
AnnotatedText resolve_labels(AnnotatedText a, const Ethogram& e);

}  // namespace sarges
