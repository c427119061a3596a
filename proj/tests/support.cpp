#include "support.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "sarges/annotation.hpp"
#include "sarges/utf8.hpp"

namespace sarges::testing {

std::string data_path(const std::string& name) { return std::string(SARGES_DATA_DIR) + "/" + name; }

std::string fixture_path(const std::string& name) {
  return std::string(SARGES_FIXTURE_DIR) + "/" + name;
}

const Ethogram& shipped_ethogram() {
  static const Ethogram e = load_ethogram_file(data_path("ethogram.json"));
  return e;
}

TempDir::TempDir() {
  std::random_device rd;
  std::mt19937_64 rng(rd());
  const auto base = std::filesystem::temp_directory_path();
  do {
    std::ostringstream name;
    name << "sarges-test-" << std::hex << rng();
    path_ = base / name.str();
  } while (std::filesystem::exists(path_));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string Responder::prompt_text(const ChatRequest& r) {
  for (const auto& m : r.messages) {
    if (m.role != "user") continue;
    const auto at = m.content.find("## Text\n");
    if (at == std::string::npos) return {};
    const auto body = at + 8;
    const auto end = m.content.find("\n\n## ", body);
    return m.content.substr(body, end == std::string::npos ? std::string::npos : end - body);
  }
  return {};
}

ChatReply Responder::operator()(const ChatRequest& r) {
  const auto text = prompt_text(r);
  auto it = scripts_.find(text);
  if (it == scripts_.end()) throw BackendError(404, "no script for '" + text + "'");
  const auto& first_user = r.messages.at(1).content;
  if (first_user.find("## Reply format\n") != std::string::npos) {
    const auto k = reflect_calls_[text]++;
    if (k >= it->second.reflections.size()) throw BackendError(500, "reflection script exhausted");
    return {it->second.reflections[k], kReflectPromptTokens, kReflectCompletionTokens};
  }
  if (first_user.find("## Task\n") != std::string::npos) {
    return {it->second.keywords, kKeywordPromptTokens, kKeywordCompletionTokens};
  }
  const auto k = label_calls_[text]++;
  if (k >= it->second.label.size()) throw BackendError(500, "label script exhausted");
  return {it->second.label[k], kLabelPromptTokens, kLabelCompletionTokens};
}

BackendCapability scripted_capability() {
  BackendCapability cap;
  cap.model_name = "scripted-gpt-4";
  cap.prompt_price = Rational(3, 100000);
  cap.completion_price = Rational(6, 100000);
  cap.currency = "USD";
  return cap;
}

void record_transcripts(const std::filesystem::path& dir, Responder responder,
                        const std::vector<std::string>& texts, const ChainConfig& cfg,
                        const CharacterProfile& profile, const Ethogram& e) {
  FunctionBackend fn([&](const ChatRequest& r) { return responder(r); }, scripted_capability());
  RecordingBackend rec(fn, dir);
  for (const auto& t : texts) run_intent_chain(t, profile, e, rec, cfg);
}

Script welcome_script() {
  return {{kWelcomeOutput},
          "to have you here\namazing",
          {"CONTEXT_MATCH: pass - welcoming a guest\nKEYWORD_MATCH: pass\n"
           "EMOTION_CONSISTENCY: pass\nREVISED:\n" +
           kWelcomeOutput}};
}

Script reflection_script() {
  const std::string three =
      "(id: A-5, description: Wave Hands) Welcome back, (id: A-97, description: Spread Arms "
      "Wide) everyone! I am so (id: A-8, description: Rub Hands) excited to see (id: B-6, "
      "description: Point at Listener) you, and I (id: D-20, description: Shake Out Hands) "
      "can't wait to start.";
  const std::string two =
      "(id: A-5, description: Wave Hands) Welcome back, (id: A-97, description: Spread Arms "
      "Wide) everyone! I am so (id: A-8, description: Rub Hands) excited to see you, and I "
      "(id: D-20, description: Shake Out Hands) can't wait to start.";
  const std::string verdicts =
      "CONTEXT_MATCH: pass - open, welcoming gestures suit a host greeting guests\n"
      "KEYWORD_MATCH: pass - every gesture matches its keyword\n"
      "EMOTION_CONSISTENCY: pass - joyful tone throughout\n";
  return {{three},
          "Welcome\neveryone\nexcited\nyou\ncan't wait",
          {verdicts + "REVISED:\n" + three, verdicts + "REVISED:\n" + two}};
}

std::pair<std::string, Script> synthetic_unit(std::size_t i) {
  static const char* const kTemplates[] = {
      "(id: A-5, description: Wave Hands) Hello, {n}! It is (id: A-3, description: Thumbs Up) "
      "great to see you.",
      "{n}, I am (id: A-8, description: Rub Hands) excited about the (id: B-25, description: "
      "Push Hand Forward) future.",
      "Why did {n} (id: C-1, description: Wave Palm Upwards) leave so early?",
      "Look (id: B-1, description: Point Finger in Target Direction) there, {n}, the (id: B-7, "
      "description: Hold Hands Far Apart) huge tower is (id: B-3, description: Point Upwards) "
      "above us.",
      "I am (id: D-1, description: Rub or Pinch Fingers) nervous, {n}. Please (id: D-10, "
      "description: Press Palms Together) hope for the best.",
      "{n} won the cup! (id: A-21, description: Raise Both Fists) Victory is ours!",
      "That smells (id: A-27, description: Pinch Nose) disgusting, {n}.",
      "{n}, (id: C-6, description: Raise Index Finger) listen, this is (id: C-2, description: "
      "Shake Interlocked Fists) really important.",
      "Thank you, {n}, I am truly (id: A-18, description: Place Hand on Heart) grateful.",
      "We finally (id: A-6, description: Clap Hands) made it, {n}! Let's (id: B-27, "
      "description: Bring Hands Together) join the others.",
  };
  static const char* const kNames[] = {"Aiko", "Ben",    "Chloé", "Dmitri", "Eun-ji",
                                       "Farah", "Gabriel", "Hana", "Iván",   "Júlia"};
  std::string annotated = kTemplates[i % 10];
  const std::string name = kNames[(i / 10) % 10];
  annotated.replace(annotated.find("{n}"), 3, name);
  const auto parsed = parse_inline(annotated);
  const auto cps = utf8::decode(parsed.clean_text);
  std::string keywords;
  for (const auto& l : parsed.labels) {
    if (!keywords.empty()) keywords += "\n";
    keywords += utf8::encode(std::u32string_view(cps).substr(l.start_char, l.duration_chars));
  }
  return {parsed.clean_text, Script{{annotated}, keywords, {}}};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace sarges::testing
