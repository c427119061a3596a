#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sarges/error.hpp"
#include "sarges/rational.hpp"

namespace sarges {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::chrono::milliseconds timeout{60000};  // transport only, not on the wire
};

struct ChatReply {
  std::string content;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

/// Declared model and per-token prices in `currency` units.
struct BackendCapability {
  std::string model_name = "scripted";
  Rational prompt_price{0};
  Rational completion_price{0};
  std::string currency = "USD";

  Rational cost(std::int64_t prompt_tokens, std::int64_t completion_tokens) const {
    return prompt_price * prompt_tokens + completion_price * completion_tokens;
  }
};

class BackendError : public Error {
 public:
  BackendError(int status, const std::string& what)
      : Error("backend error (status " + std::to_string(status) + "): " + what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class BackendTimeout : public Error {
 public:
  using Error::Error;
};

/// Chat-completion JSON body: {"model","messages":[{role,content}],"temperature"}.
std::string wire_body(const ChatRequest& r);
/// SHA-256 of wire_body(). Exact: any prompt edit changes the digest.
std::string request_digest(const ChatRequest& r);

/// The only operation is send(). Implementations must tolerate concurrent
/// callers.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatReply send(const ChatRequest& request) = 0;
  virtual const BackendCapability& capability() const = 0;
};

/// Replays a transcript directory: one `<digest>.json` per request holding
/// {"request": <wire body>, "reply": {"content", "prompt_tokens",
/// "completion_tokens"}}, plus an optional `manifest.json` with
/// {"model", "prompt_price", "completion_price", "currency"}.
class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(const std::filesystem::path& dir);

  ChatReply send(const ChatRequest& request) override;
  const BackendCapability& capability() const override { return capability_; }
  std::size_t transcript_count() const { return replies_.size(); }

 private:
  BackendCapability capability_;
  std::map<std::string, ChatReply> replies_;
  std::mutex mutex_;
};

/// Passes requests through to `inner` and writes each exchange as a
/// ScriptedBackend transcript.
class RecordingBackend final : public ChatBackend {
 public:
  RecordingBackend(ChatBackend& inner, std::filesystem::path dir);

  ChatReply send(const ChatRequest& request) override;
  const BackendCapability& capability() const override { return inner_.capability(); }

 private:
  ChatBackend& inner_;
  std::filesystem::path dir_;
  std::mutex mutex_;
};

/// In-process backend driven by a callable. Calls are serialized.
class FunctionBackend final : public ChatBackend {
 public:
  using Handler = std::function<ChatReply(const ChatRequest&)>;
  FunctionBackend(Handler handler, BackendCapability capability = {});

  ChatReply send(const ChatRequest& request) override;
  const BackendCapability& capability() const override { return capability_; }

 private:
  Handler handler_;
  BackendCapability capability_;
  std::mutex mutex_;
};

void write_transcript(const std::filesystem::path& dir, const ChatRequest& request,
                      const ChatReply& reply);
void write_manifest(const std::filesystem::path& dir, const BackendCapability& capability);

/// Any chat-completion HTTP API (OpenAI-style /v1/chat/completions).
class RemoteEndpointBackend final : public ChatBackend {
 public:
  struct Options {
    std::string url;      // full endpoint, e.g. https://api.example.com/v1/chat/completions
    std::string api_key;  // sent as "Authorization: Bearer <key>" when non-empty
    BackendCapability capability;
  };

  explicit RemoteEndpointBackend(Options options);
  ChatReply send(const ChatRequest& request) override;
  const BackendCapability& capability() const override { return options_.capability; }

 private:
  Options options_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace sarges
