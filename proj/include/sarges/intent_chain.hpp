#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sarges/jsonio.hpp"

#include "sarges/annotation.hpp"
#include "sarges/backend.hpp"
#include "sarges/ethogram.hpp"

namespace sarges {

struct CharacterProfile {
  std::string name;
  std::string persona_description;
  std::string speaking_style;

  static CharacterProfile default_host();
  static CharacterProfile from_json(const Json& j);
  void check() const;
};

struct ChainConfig {
  int max_reflection_rounds = 3;
  int max_labels_per_sentence = 2;
  std::chrono::milliseconds backend_timeout{60000};
  double temperature = 0.0;

  void check() const;
  Json to_json() const;
  /// Short hex digest of to_json(), stamped into dataset provenance.
  std::string digest() const;
};

struct PromptSection {
  std::string heading;
  std::string body;
};

/// A system message plus ordered user-message sections.
struct StructuredPrompt {
  std::string system;
  std::vector<PromptSection> sections;

  std::string user_text() const;
  std::vector<ChatMessage> messages() const;
};

class EmptyText : public Error {
 public:
  EmptyText() : Error("input text is empty") {}
};

/// Profile, theme/intent step, keyword step, guideline digest, output
/// format, input text: in that order.
StructuredPrompt build_cot_prompt(std::string_view text, const CharacterProfile& profile,
                                  const Ethogram& e, const ChainConfig& cfg = {});
StructuredPrompt build_keyword_prompt(std::string_view text, const CharacterProfile& profile);

struct KeywordSpan {
  std::size_t start_char = 0;
  std::size_t length = 0;
  std::string text;
  friend bool operator==(const KeywordSpan&, const KeywordSpan&) = default;
};

/// Parses a newline/`|`/`,`/`;`-delimited keyword list into every
/// occurrence of each keyword in `clean_text`. Keywords that are not exact
/// substrings are dropped and reported through `warnings`.
std::vector<KeywordSpan> parse_keyword_reply(std::string_view reply, std::string_view clean_text,
                                             std::vector<std::string>* warnings = nullptr);

struct ActionChecks {
  bool positional_consistency = false;
  bool moderation = false;
  bool passed() const { return positional_consistency && moderation; }
  friend bool operator==(const ActionChecks&, const ActionChecks&) = default;
};

ActionChecks check_action_relevance(const AnnotatedText& a, const ChainConfig& cfg,
                                    const std::vector<KeywordSpan>& keywords);

/// Keeps the first max_labels_per_sentence labels of every sentence.
AnnotatedText enforce_moderation(const AnnotatedText& a, const ChainConfig& cfg);

class Unparseable : public Error {
 public:
  using Error::Error;
};

/// Extracts annotated text from a chat reply: fenced blocks, the reply
/// itself, then suffixes after each line break (longest first), each
/// with an "Output:" label and enclosing quotes removed. With
/// `expected_clean`, only a region whose clean text equals it is accepted.
AnnotatedText parse_backend_output(std::string_view raw,
                                   std::optional<std::string_view> expected_clean = std::nullopt);

enum class Verdict { Pass, Fail, Unknown };
const char* to_string(Verdict v);

struct SemanticCheck {
  Verdict verdict = Verdict::Unknown;
  std::string rationale;
  friend bool operator==(const SemanticCheck&, const SemanticCheck&) = default;
};

struct SemanticChecks {
  SemanticCheck context_match;
  SemanticCheck keyword_match;
  SemanticCheck emotion_consistency;
  bool any_failed() const;
  friend bool operator==(const SemanticChecks&, const SemanticChecks&) = default;
};

SemanticChecks parse_semantic_verdicts(std::string_view reply);

/// `round` counts reflection requests from 1, so a round whose candidate did
/// not change still sends a distinct request.
StructuredPrompt build_reflection_prompt(std::string_view text, const CharacterProfile& profile,
                                         const Ethogram& e, const AnnotatedText& previous,
                                         const std::vector<KeywordSpan>& keywords,
                                         const ActionChecks& checks, const ChainConfig& cfg,
                                         int round);

/// Round 1 scores the initial labeling pass. Each later round follows one
/// reflection request. The initial pass is only accepted outright when
/// reflection is disabled.
struct ReflectionReport {
  int round = 1;
  bool reflected = false;
  SemanticChecks semantic;
  ActionChecks action;
  bool accepted = false;
  friend bool operator==(const ReflectionReport&, const ReflectionReport&) = default;
};

struct TokenUsage {
  std::int64_t request_count = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::vector<double> request_seconds;
  double total_seconds = 0.0;
  Rational cost{0};

  void record(const ChatReply& reply, double seconds, const BackendCapability& cap);
  void merge(const TokenUsage& other);
};

struct TranscriptEntry {
  std::string stage;  // label | keywords | reflect-N, with "-retry-K" suffixes
  std::string request_digest;
  std::string reply;
};

struct ChainResult {
  AnnotatedText result;
  std::vector<ReflectionReport> reports;
  TokenUsage usage;
  std::vector<KeywordSpan> keywords;
  std::vector<std::string> warnings;
  std::vector<TranscriptEntry> transcript;
};

class ChainError : public Error {
 public:
  enum class Kind { Timeout, Backend, Unparseable };
  ChainError(Kind kind, int status, const std::string& what, std::vector<TranscriptEntry> partial)
      : Error(what), kind_(kind), status_(status), transcript_(std::move(partial)) {}

  Kind kind() const { return kind_; }
  int status() const { return status_; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

 private:
  Kind kind_;
  int status_;
  std::vector<TranscriptEntry> transcript_;
};

inline constexpr int kUnparseableRetries = 2;

ChainResult run_intent_chain(std::string_view text, const CharacterProfile& profile,
                             const Ethogram& e, ChatBackend& backend, const ChainConfig& cfg);

Json report_to_json(const ReflectionReport& r);
Json usage_to_json(const TokenUsage& u);

}  // namespace sarges
