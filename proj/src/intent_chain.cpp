#include "sarges/intent_chain.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "sarges/digest.hpp"
#include "sarges/utf8.hpp"

namespace sarges {
namespace {

constexpr std::string_view kSystemPrompt =
    "You annotate dialogue lines for a virtual agent with co-speech gesture labels drawn "
    "from a fixed gesture ethogram.";

std::string profile_text(const CharacterProfile& p) {
  std::ostringstream os;
  if (!p.name.empty()) os << "Name: " << p.name << "\n";
  os << "Persona: " << p.persona_description;
  if (!p.speaking_style.empty()) os << "\nSpeaking style: " << p.speaking_style;
  return os.str();
}

std::string guideline_digest(const Ethogram& e) {
  std::ostringstream os;
  bool first = true;
  for (const auto& g : e.entries()) {
    if (!first) os << "\n";
    first = false;
    os << "- " << g.id.canonical() << " | " << g.name << " | " << g.guideline << " | keywords: ";
    for (std::size_t i = 0; i < g.keywords.size(); ++i) os << (i ? ", " : "") << g.keywords[i];
  }
  return os.str();
}

std::string strip_label(std::string s) {
  const auto lower = utf8::ascii_lower(s.substr(0, 8));
  if (lower.rfind("output:", 0) == 0) s = utf8::trim(s.substr(7));
  return s;
}

std::string strip_quotes(std::string s) {
  auto strip = [&](std::string_view open, std::string_view close) {
    if (s.size() >= open.size() + close.size() && s.compare(0, open.size(), open) == 0 &&
        s.compare(s.size() - close.size(), close.size(), close) == 0) {
      s = s.substr(open.size(), s.size() - open.size() - close.size());
      return true;
    }
    return false;
  };
  if (!strip("\"", "\"")) strip("\xE2\x80\x9C", "\xE2\x80\x9D");
  return s;
}

std::vector<std::string> fenced_blocks(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto open = raw.find("```", pos);
    if (open == std::string_view::npos) break;
    auto body = raw.find('\n', open);
    if (body == std::string_view::npos) break;
    auto close = raw.find("```", body);
    if (close == std::string_view::npos) break;
    out.emplace_back(raw.substr(body + 1, close - body - 1));
    pos = close + 3;
  }
  return out;
}

std::string strip_bullet(std::string s) {
  std::size_t i = 0;
  if (!s.empty() && (s[0] == '-' || s[0] == '*')) {
    i = 1;
  } else if (s.rfind("\xE2\x80\xA2", 0) == 0) {
    i = 3;
  } else {
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')')) {
      ++i;
    } else {
      i = 0;
    }
  }
  return utf8::trim(s.substr(i));
}

std::string format_checks(const ActionChecks& c) {
  return std::string("positional consistency: ") + (c.positional_consistency ? "pass" : "fail") +
         "\nmoderation: " + (c.moderation ? "pass" : "fail");
}

}  // namespace

CharacterProfile CharacterProfile::default_host() {
  return {"Mika",
          "A warm, outgoing virtual host who welcomes guests and keeps the conversation upbeat.",
          "friendly, expressive, concise"};
}

CharacterProfile CharacterProfile::from_json(const Json& j) {
  CharacterProfile p;
  p.name = j.value("name", std::string{});
  p.persona_description = j.value("persona_description", std::string{});
  p.speaking_style = j.value("speaking_style", std::string{});
  p.check();
  return p;
}

void CharacterProfile::check() const {
  if (persona_description.empty()) throw Error("character profile needs a persona_description");
}

void ChainConfig::check() const {
  if (max_reflection_rounds < 0) throw Error("max_reflection_rounds must be >= 0");
  if (max_labels_per_sentence < 1) throw Error("max_labels_per_sentence must be >= 1");
  if (backend_timeout.count() <= 0) throw Error("backend_timeout must be positive");
}

Json ChainConfig::to_json() const {
  Json j;
  j["max_reflection_rounds"] = max_reflection_rounds;
  j["max_labels_per_sentence"] = max_labels_per_sentence;
  j["backend_timeout_ms"] = backend_timeout.count();
  j["temperature"] = temperature;
  return j;
}

std::string ChainConfig::digest() const { return sha256_hex(to_json().dump()).substr(0, 16); }

std::string StructuredPrompt::user_text() const {
  std::string out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    if (i) out += "\n\n";
    out += "## " + sections[i].heading + "\n" + sections[i].body;
  }
  return out;
}

std::vector<ChatMessage> StructuredPrompt::messages() const {
  return {{"system", system}, {"user", user_text()}};
}

StructuredPrompt build_cot_prompt(std::string_view text, const CharacterProfile& profile,
                                  const Ethogram& e, const ChainConfig& cfg) {
  const auto clean = utf8::trim(text);
  if (clean.empty()) throw EmptyText();
  const auto limit = std::to_string(cfg.max_labels_per_sentence);
  StructuredPrompt p;
  p.system = std::string(kSystemPrompt);
  p.sections = {
      {"Character profile", profile_text(profile)},
      {"Step 1: theme and intent",
       "Work out the theme of the conversation and the primary intent of the speaker."},
      {"Step 2: keywords",
       "Based on that intent, find the keywords of the text that a speaker with this "
       "character's personality would accompany with a gesture."},
      {"Gesture guidelines",
       "Choose gestures only from this list (id | name | usage guideline | keywords):\n" +
           guideline_digest(e)},
      {"Step 3: gesture selection and output",
       "For each keyword, select the most suitable gesture from the guidelines, considering "
       "the character and the context. Use at most " + limit +
           " gestures per sentence. Insert each gesture immediately before its keyword as "
           "(id: <gesture id>, description: <gesture name>) followed by a space. Reply with "
           "the annotated text only and leave every other character of the text unchanged."},
      {"Text", clean},
  };
  return p;
}

StructuredPrompt build_keyword_prompt(std::string_view text, const CharacterProfile& profile) {
  const auto clean = utf8::trim(text);
  if (clean.empty()) throw EmptyText();
  StructuredPrompt p;
  p.system = std::string(kSystemPrompt);
  p.sections = {
      {"Character profile", profile_text(profile)},
      {"Task",
       "List the keywords of the text that carry the speaker's intent and would be "
       "accompanied by a gesture. Copy each keyword exactly as it appears in the text, one "
       "per line, without numbering or commentary."},
      {"Text", clean},
  };
  return p;
}

StructuredPrompt build_reflection_prompt(std::string_view text, const CharacterProfile& profile,
                                         const Ethogram& e, const AnnotatedText& previous,
                                         const std::vector<KeywordSpan>& keywords,
                                         const ActionChecks& checks, const ChainConfig& cfg,
                                         int round) {
  const auto clean = utf8::trim(text);
  if (clean.empty()) throw EmptyText();
  std::string kw;
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    if (i && keywords[i].text == keywords[i - 1].text) continue;
    kw += (kw.empty() ? "" : "\n") + keywords[i].text + " @" + std::to_string(keywords[i].start_char);
  }
  StructuredPrompt p;
  p.system = std::string(kSystemPrompt);
  p.sections = {
      {"Character profile", profile_text(profile)},
      {"Reflection rules",
       "Reflection round " + std::to_string(round) + " of " +
           std::to_string(cfg.max_reflection_rounds) + ". Review the annotation below.\n"
       "Semantic relevance:\n"
       "1. Context matching: gestures fit the speaker's identity, the theme and the setting "
       "(open gestures in positive contexts, composed postures in serious ones).\n"
       "2. Keyword matching: each gesture semantically matches its keyword.\n"
       "3. Emotional consistency: gestures follow the emotional tone of the text.\n"
       "Action relevance:\n"
       "4. Positional consistency: each gesture sits immediately before a keyword.\n"
       "5. Moderation: gestures are not too frequent, no more than " +
           std::to_string(cfg.max_labels_per_sentence) + " per sentence."},
      {"Gesture guidelines", guideline_digest(e)},
      {"Keywords", kw.empty() ? "(none)" : kw},
      {"Local checks", format_checks(checks)},
      {"Previous annotation", render_inline(previous)},
      {"Text", clean},
      {"Reply format",
       "CONTEXT_MATCH: pass|fail - <reason>\n"
       "KEYWORD_MATCH: pass|fail - <reason>\n"
       "EMOTION_CONSISTENCY: pass|fail - <reason>\n"
       "REVISED:\n"
       "<the annotated text, corrected wherever a rule failed>"},
  };
  return p;
}

std::vector<KeywordSpan> parse_keyword_reply(std::string_view reply, std::string_view clean_text,
                                             std::vector<std::string>* warnings) {
  std::vector<std::string> words;
  std::string cur;
  auto flush = [&] {
    auto w = strip_bullet(utf8::trim(cur));
    cur.clear();
    if (utf8::ascii_lower(w.substr(0, 9)) == "keywords:") w = utf8::trim(w.substr(9));
    w = utf8::trim(strip_quotes(w));
    if (!w.empty() && std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
  };
  for (char c : reply) {
    if (c == '\n' || c == '|' || c == ',' || c == ';') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();

  const auto hay = utf8::decode(clean_text);
  std::vector<KeywordSpan> spans;
  for (const auto& w : words) {
    std::u32string needle;
    try {
      needle = utf8::decode(w);
    } catch (const EncodingError&) {
      if (warnings) warnings->push_back("keyword with invalid encoding dropped");
      continue;
    }
    bool found = false;
    for (auto pos = hay.find(needle); pos != std::u32string::npos; pos = hay.find(needle, pos + 1)) {
      spans.push_back({pos, needle.size(), w});
      found = true;
    }
    if (!found && warnings) warnings->push_back("keyword '" + w + "' not found in text; dropped");
  }
  std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) {
    return std::tie(a.start_char, a.length) < std::tie(b.start_char, b.length);
  });
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  return spans;
}

ActionChecks check_action_relevance(const AnnotatedText& a, const ChainConfig& cfg,
                                    const std::vector<KeywordSpan>& keywords) {
  ActionChecks c{true, true};
  if (a.labels.empty()) return c;
  const auto spans = split_sentences(a.clean_text);
  if (spans.empty()) {
    c.moderation = a.labels.size() <= static_cast<std::size_t>(cfg.max_labels_per_sentence);
  } else {
    std::vector<std::size_t> counts(spans.size(), 0);
    for (const auto& l : a.labels) ++counts[sentence_of(spans, l.start_char)];
    c.moderation = std::all_of(counts.begin(), counts.end(), [&](std::size_t n) {
      return n <= static_cast<std::size_t>(cfg.max_labels_per_sentence);
    });
  }
  c.positional_consistency = std::all_of(a.labels.begin(), a.labels.end(), [&](const auto& l) {
    return std::any_of(keywords.begin(), keywords.end(),
                       [&](const KeywordSpan& k) { return k.start_char == l.start_char; });
  });
  return c;
}

AnnotatedText enforce_moderation(const AnnotatedText& a, const ChainConfig& cfg) {
  const auto limit = static_cast<std::size_t>(cfg.max_labels_per_sentence);
  AnnotatedText out{a.clean_text, {}};
  const auto spans = split_sentences(a.clean_text);
  std::vector<std::size_t> counts(std::max<std::size_t>(spans.size(), 1), 0);
  for (const auto& l : a.labels) {
    const auto s = spans.empty() ? 0 : sentence_of(spans, l.start_char);
    if (counts[s]++ < limit) out.labels.push_back(l);
  }
  return out;
}

AnnotatedText parse_backend_output(std::string_view raw,
                                   std::optional<std::string_view> expected_clean) {
  std::vector<std::string> regions = fenced_blocks(raw);
  regions.emplace_back(raw);
  for (std::size_t nl = raw.find('\n'); nl != std::string_view::npos; nl = raw.find('\n', nl + 1)) {
    regions.emplace_back(raw.substr(nl + 1));
  }
  const std::optional<std::string> expected =
      expected_clean ? std::optional<std::string>(utf8::trim(*expected_clean)) : std::nullopt;

  std::string last_problem = "reply is empty";
  for (const auto& region : regions) {
    auto base = utf8::trim(region);
    for (const auto& candidate : {base, utf8::trim(strip_quotes(strip_label(base)))}) {
      if (candidate.empty()) continue;
      try {
        auto parsed = parse_inline(candidate);
        if (expected && parsed.clean_text != *expected) {
          last_problem = "reply text does not match the input text";
          continue;
        }
        return parsed;
      } catch (const MalformedMarker& e) {
        last_problem = e.what();
      } catch (const EncodingError& e) {
        last_problem = e.what();
      }
    }
  }
  throw Unparseable("no annotated text found in backend reply: " + last_problem);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

bool SemanticChecks::any_failed() const {
  return context_match.verdict == Verdict::Fail || keyword_match.verdict == Verdict::Fail ||
         emotion_consistency.verdict == Verdict::Fail;
}

SemanticChecks parse_semantic_verdicts(std::string_view reply) {
  SemanticChecks out;
  std::istringstream in{std::string(reply)};
  std::string line;
  while (std::getline(in, line)) {
    line = utf8::trim(line);
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto key = utf8::ascii_lower(utf8::trim(line.substr(0, colon)));
    std::replace(key.begin(), key.end(), ' ', '_');
    SemanticCheck* slot = key == "context_match"         ? &out.context_match
                          : key == "keyword_match"       ? &out.keyword_match
                          : key == "emotion_consistency" ? &out.emotion_consistency
                                                         : nullptr;
    if (!slot) continue;
    auto value = utf8::trim(line.substr(colon + 1));
    std::size_t word_end = 0;
    while (word_end < value.size() && std::isalpha(static_cast<unsigned char>(value[word_end]))) {
      ++word_end;
    }
    const auto word = utf8::ascii_lower(value.substr(0, word_end));
    if (word == "pass" || word == "passed") {
      slot->verdict = Verdict::Pass;
    } else if (word == "fail" || word == "failed") {
      slot->verdict = Verdict::Fail;
    } else {
      continue;
    }
    auto rest = utf8::trim(value.substr(word_end));
    while (!rest.empty() && (rest[0] == '-' || rest[0] == ':' || rest[0] == ',')) {
      rest = utf8::trim(rest.substr(1));
    }
    slot->rationale = rest;
  }
  return out;
}

void TokenUsage::record(const ChatReply& reply, double seconds, const BackendCapability& cap) {
  ++request_count;
  prompt_tokens += reply.prompt_tokens;
  completion_tokens += reply.completion_tokens;
  request_seconds.push_back(seconds);
  total_seconds += seconds;
  cost += cap.cost(reply.prompt_tokens, reply.completion_tokens);
}

void TokenUsage::merge(const TokenUsage& other) {
  request_count += other.request_count;
  prompt_tokens += other.prompt_tokens;
  completion_tokens += other.completion_tokens;
  request_seconds.insert(request_seconds.end(), other.request_seconds.begin(),
                         other.request_seconds.end());
  total_seconds += other.total_seconds;
  cost += other.cost;
}

namespace {

class ChainRun {
 public:
  ChainRun(ChatBackend& backend, const ChainConfig& cfg, ChainResult& out)
      : backend_(backend), cfg_(cfg), out_(out) {}

  std::string call(const std::string& stage, const std::vector<ChatMessage>& messages) {
    ChatRequest req{backend_.capability().model_name, messages, cfg_.temperature,
                    cfg_.backend_timeout};
    const auto digest = request_digest(req);
    const auto t0 = std::chrono::steady_clock::now();
    ChatReply reply;
    try {
      reply = backend_.send(req);
    } catch (const BackendTimeout& e) {
      out_.transcript.push_back({stage, digest, ""});
      throw ChainError(ChainError::Kind::Timeout, 0, stage + ": " + e.what(), out_.transcript);
    } catch (const BackendError& e) {
      out_.transcript.push_back({stage, digest, ""});
      throw ChainError(ChainError::Kind::Backend, e.status(), stage + ": " + e.what(),
                       out_.transcript);
    }
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    out_.usage.record(reply, dt.count(), backend_.capability());
    out_.transcript.push_back({stage, digest, reply.content});
    return reply.content;
  }

  // Sends, extracts, and on Unparseable re-asks with the failed reply and the
  // reason appended to the conversation.
  template <typename Extract>
  auto ask(const std::string& stage, std::vector<ChatMessage> messages, Extract extract) {
    for (int attempt = 0;; ++attempt) {
      const auto name = attempt == 0 ? stage : stage + "-retry-" + std::to_string(attempt);
      const auto reply = call(name, messages);
      try {
        return extract(reply);
      } catch (const Unparseable& e) {
        if (attempt == kUnparseableRetries) {
          throw ChainError(ChainError::Kind::Unparseable, 0, name + ": " + e.what(),
                           out_.transcript);
        }
        messages.push_back({"assistant", reply});
        messages.push_back({"user", std::string("Your reply could not be used (") + e.what() +
                                        "). Reply again in the required format and leave the "
                                        "text itself unchanged."});
      }
    }
  }

 private:
  ChatBackend& backend_;
  const ChainConfig& cfg_;
  ChainResult& out_;
};

AnnotatedText parse_revision(std::string_view reply, std::string_view expected) {
  const auto lower = utf8::ascii_lower(reply);
  const auto at = lower.find("revised:");
  if (at != std::string::npos) {
    return parse_backend_output(reply.substr(at + 8), expected);
  }
  return parse_backend_output(reply, expected);
}

}  // namespace

ChainResult run_intent_chain(std::string_view text, const CharacterProfile& profile,
                             const Ethogram& e, ChatBackend& backend, const ChainConfig& cfg) {
  cfg.check();
  profile.check();
  const auto clean = utf8::trim(text);
  if (clean.empty()) throw EmptyText();

  ChainResult out;
  ChainRun run(backend, cfg, out);

  auto candidate = run.ask("label", build_cot_prompt(clean, profile, e, cfg).messages(),
                           [&](const std::string& r) { return parse_backend_output(r, clean); });
  const auto kw_reply = run.call("keywords", build_keyword_prompt(clean, profile).messages());
  out.keywords = parse_keyword_reply(kw_reply, clean, &out.warnings);

  ReflectionReport first;
  first.round = 1;
  first.action = check_action_relevance(candidate, cfg, out.keywords);
  first.accepted = first.action.passed() && cfg.max_reflection_rounds == 0;
  out.reports.push_back(first);

  for (int k = 1; k <= cfg.max_reflection_rounds && !out.reports.back().accepted; ++k) {
    const auto prompt = build_reflection_prompt(clean, profile, e, candidate, out.keywords,
                                                out.reports.back().action, cfg, k);
    auto [semantic, revised] =
        run.ask("reflect-" + std::to_string(k), prompt.messages(), [&](const std::string& r) {
          return std::pair{parse_semantic_verdicts(r), parse_revision(r, clean)};
        });
    candidate = std::move(revised);
    ReflectionReport rep;
    rep.round = k + 1;
    rep.reflected = true;
    rep.semantic = std::move(semantic);
    rep.action = check_action_relevance(candidate, cfg, out.keywords);
    rep.accepted = rep.action.passed() && !rep.semantic.any_failed();
    out.reports.push_back(std::move(rep));
  }

  out.result = enforce_moderation(candidate, cfg);
  return out;
}

Json report_to_json(const ReflectionReport& r) {
  auto check = [](const SemanticCheck& c) {
    return Json{{"verdict", to_string(c.verdict)}, {"rationale", c.rationale}};
  };
  Json j;
  j["round"] = r.round;
  j["reflected"] = r.reflected;
  j["semantic_checks"] = {{"context_match", check(r.semantic.context_match)},
                          {"keyword_match", check(r.semantic.keyword_match)},
                          {"emotion_consistency", check(r.semantic.emotion_consistency)}};
  j["action_checks"] = {{"positional_consistency", r.action.positional_consistency},
                        {"moderation", r.action.moderation}};
  j["accepted"] = r.accepted;
  return j;
}

Json usage_to_json(const TokenUsage& u) {
  Json j;
  j["requests"] = u.request_count;
  j["prompt_tokens"] = u.prompt_tokens;
  j["completion_tokens"] = u.completion_tokens;
  j["seconds"] = u.total_seconds;
  j["cost"] = to_string(u.cost);
  return j;
}

}  // namespace sarges
