#include "sarges/backend.hpp"

#include <algorithm>
#include <fstream>

#include "sarges/digest.hpp"
#include "sarges/jsonio.hpp"
#include "sarges/sidecar.hpp"

namespace sarges {
namespace fs = std::filesystem;

namespace {

Json request_json(const ChatRequest& r) {
  Json j;
  j["model"] = r.model;
  Json msgs = Json::array();
  for (const auto& m : r.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  j["messages"] = std::move(msgs);
  j["temperature"] = r.temperature;
  return j;
}

Rational price_from_json(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return Rational(0);
  if (it->is_string()) return parse_rational(it->get<std::string>());
  if (it->is_number_integer()) return Rational(it->get<std::int64_t>());
  throw Error(std::string("manifest: '") + key + "' must be a string like \"3/100000\"");
}

}  // namespace

std::string wire_body(const ChatRequest& r) { return request_json(r).dump(); }

std::string request_digest(const ChatRequest& r) { return sha256_hex(wire_body(r)); }

ScriptedBackend::ScriptedBackend(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("transcript directory '" + dir.string() + "' not found");
  std::vector<fs::path> files;
  for (const auto& ent : fs::directory_iterator(dir)) {
    if (ent.is_regular_file() && ent.path().extension() == ".json") files.push_back(ent.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    Json j;
    try {
      j = Json::parse(read_text_file(p.string()));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error("transcript '" + p.string() + "': " + e.what());
    }
    if (p.filename() == "manifest.json") {
      capability_.model_name = j.value("model", capability_.model_name);
      capability_.currency = j.value("currency", capability_.currency);
      capability_.prompt_price = price_from_json(j, "prompt_price");
      capability_.completion_price = price_from_json(j, "completion_price");
      continue;
    }
    const auto reply = j.find("reply");
    if (reply == j.end() || !reply->is_object() || !reply->contains("content")) {
      throw Error("transcript '" + p.string() + "': missing reply.content");
    }
    ChatReply r;
    r.content = (*reply)["content"].get<std::string>();
    r.prompt_tokens = reply->value("prompt_tokens", std::int64_t{0});
    r.completion_tokens = reply->value("completion_tokens", std::int64_t{0});
    replies_.emplace(p.stem().string(), std::move(r));
  }
}

ChatReply ScriptedBackend::send(const ChatRequest& request) {
  const auto digest = request_digest(request);
  std::lock_guard lock(mutex_);
  auto it = replies_.find(digest);
  if (it == replies_.end()) throw BackendError(404, "no transcript for request digest " + digest);
  return it->second;
}

void write_transcript(const fs::path& dir, const ChatRequest& request, const ChatReply& reply) {
  fs::create_directories(dir);
  Json j;
  j["request"] = request_json(request);
  j["reply"] = {{"content", reply.content},
                {"prompt_tokens", reply.prompt_tokens},
                {"completion_tokens", reply.completion_tokens}};
  write_text_file((dir / (request_digest(request) + ".json")).string(), j.dump(2) + "\n");
}

void write_manifest(const fs::path& dir, const BackendCapability& capability) {
  fs::create_directories(dir);
  Json j;
  j["model"] = capability.model_name;
  j["prompt_price"] = to_string(capability.prompt_price);
  j["completion_price"] = to_string(capability.completion_price);
  j["currency"] = capability.currency;
  write_text_file((dir / "manifest.json").string(), j.dump(2) + "\n");
}

RecordingBackend::RecordingBackend(ChatBackend& inner, fs::path dir)
    : inner_(inner), dir_(std::move(dir)) {
  write_manifest(dir_, inner_.capability());
}

ChatReply RecordingBackend::send(const ChatRequest& request) {
  auto reply = inner_.send(request);
  std::lock_guard lock(mutex_);
  write_transcript(dir_, request, reply);
  return reply;
}

FunctionBackend::FunctionBackend(Handler handler, BackendCapability capability)
    : handler_(std::move(handler)), capability_(std::move(capability)) {}

ChatReply FunctionBackend::send(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  return handler_(request);
}

}  // namespace sarges
