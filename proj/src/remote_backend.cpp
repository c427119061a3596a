#include <chrono>
#include <regex>

#include <httplib.h>

#include "sarges/backend.hpp"
#include "sarges/jsonio.hpp"

namespace sarges {

RemoteEndpointBackend::RemoteEndpointBackend(Options options) : options_(std::move(options)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(options_.url, m, kUrl)) {
    throw Error("invalid endpoint URL '" + options_.url + "'");
  }
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/chat/completions";
}

ChatReply RemoteEndpointBackend::send(const ChatRequest& request) {
  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, wire_body(request), "application/json");
  if (!res) {
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read &&
                            std::chrono::steady_clock::now() - started >= request.timeout);
    if (timed_out) throw BackendTimeout("backend request timed out after " +
                                        std::to_string(request.timeout.count()) + " ms");
    throw BackendError(0, "transport failure: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError(res->status, res->body.substr(0, 512));
  }

  Json j;
  try {
    j = Json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw BackendError(res->status, std::string("malformed response body: ") + e.what());
  }
  ChatReply reply;
  try {
    reply.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw BackendError(res->status, "response has no choices[0].message.content");
  }
  if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
    reply.prompt_tokens = u->value("prompt_tokens", std::int64_t{0});
    reply.completion_tokens = u->value("completion_tokens", std::int64_t{0});
  }
  return reply;
}

}  // namespace sarges
