#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sarges/backend.hpp"
#include "sarges/ethogram.hpp"
#include "sarges/intent_chain.hpp"

namespace sarges::testing {

std::string data_path(const std::string& name);     // <repo>/data/<name>
std::string fixture_path(const std::string& name);  // <repo>/tests/fixtures/<name>

const Ethogram& shipped_ethogram();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Canned replies for one input text. `label` holds the first labeling reply
/// followed by the replies to each retry; `reflections` one reply per round.
struct Script {
  std::vector<std::string> label;
  std::string keywords;
  std::vector<std::string> reflections;
};

/// Fixed token counts reported for each stage.
inline constexpr std::int64_t kLabelPromptTokens = 1200;
inline constexpr std::int64_t kLabelCompletionTokens = 60;
inline constexpr std::int64_t kKeywordPromptTokens = 400;
inline constexpr std::int64_t kKeywordCompletionTokens = 10;
inline constexpr std::int64_t kReflectPromptTokens = 1500;
inline constexpr std::int64_t kReflectCompletionTokens = 80;

/// Stand-in for a chat model: answers by stage (labeling, keyword, reflection)
/// and by the text embedded in the prompt.
class Responder {
 public:
  void add(const std::string& text, Script s) { scripts_[text] = std::move(s); }
  ChatReply operator()(const ChatRequest& r);

  /// Text found under the "## Text" heading of the first user message.
  static std::string prompt_text(const ChatRequest& r);

 private:
  std::map<std::string, Script> scripts_;
  std::map<std::string, std::size_t> label_calls_;
  std::map<std::string, std::size_t> reflect_calls_;
};

BackendCapability scripted_capability();

/// Runs the chain once per text against `responder`, recording every
/// exchange into `dir` so that ScriptedBackend(dir) replays it.
void record_transcripts(const std::filesystem::path& dir, Responder responder,
                        const std::vector<std::string>& texts, const ChainConfig& cfg,
                        const CharacterProfile& profile = CharacterProfile::default_host(),
                        const Ethogram& e = shipped_ethogram());

inline const std::string kWelcomeInput =
    "Hello, it's great to have you here today. You are truly amazing!";
inline const std::string kWelcomeOutput =
    "Hello, it's great (id: A-97, description: spreading arms wide) to have you here today. "
    "You are truly (id: A-6, description: clapping) amazing!";
Script welcome_script();

/// Two sentences; the second carries three gestures until the second
/// reflection round trims it to two.
inline const std::string kReflectInput =
    "Welcome back, everyone! I am so excited to see you, and I can't wait to start.";
Script reflection_script();

/// Deterministic sentence `i` of a synthetic corpus together with its script.
std::pair<std::string, Script> synthetic_unit(std::size_t i);

std::string slurp(const std::string& path);

}  // namespace sarges::testing
