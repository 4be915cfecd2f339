#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "tutor/error.hpp"
#include "tutor/translation.hpp"

namespace tutor {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw TutorError(ErrorCode::BadRequest, url, "endpoint needs a scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

// Wire contract:
//   POST <path>  Authorization: Bearer <key>
//   {"source": "en", "target": "fa", "text": "..."}
//   200 -> {"text": "..."}
//   otherwise -> {"error": {"code": "unsupported_pair" | "auth" | "unavailable" | "bad_request",
//                           "message": "..."}}
class RemoteBackend final : public TranslatorBackend {
 public:
  explicit RemoteBackend(RemoteConfig config) : config_(std::move(config)), endpoint_(split_endpoint(config_.endpoint)) {}

  std::string_view name() const override { return "remote"; }

  std::optional<std::set<LanguagePair>> capability() const override {
    if (!config_.languages) return std::nullopt;
    std::set<LanguagePair> pairs;
    for (const auto& a : *config_.languages) {
      for (const auto& b : *config_.languages) {
        if (a != b) pairs.insert({a, b});
      }
    }
    return pairs;
  }

  std::string translate(const TranslationRequest& request) override {
    const auto pair = request.source + "->" + request.target;
    if (!supports(request.source, request.target)) throw TutorError(ErrorCode::UnsupportedPair, pair);

    const std::string body =
        nlohmann::json{{"source", request.source}, {"target", request.target}, {"text", request.text}}.dump();
    std::string last_failure;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));

      httplib::Client client(endpoint_.origin);
      const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
      const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
      client.set_connection_timeout(seconds.count(), micros.count());
      client.set_read_timeout(seconds.count(), micros.count());
      client.set_write_timeout(seconds.count(), micros.count());
      httplib::Headers headers;
      if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

      auto response = client.Post(endpoint_.path, headers, body, "application/json");
      if (!response) {
        last_failure = httplib::to_string(response.error());
        continue;
      }
      if (response->status == 200) {
        try {
          return nlohmann::json::parse(response->body).at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
          throw TutorError(ErrorCode::BackendUnavailable, "remote", std::string("malformed response: ") + e.what());
        }
      }
      std::string code;
      std::string message;
      try {
        const auto j = nlohmann::json::parse(response->body);
        code = j.at("error").value("code", "");
        message = j.at("error").value("message", "");
      } catch (const nlohmann::json::exception&) {
      }
      if (response->status == 401 || response->status == 403 || code == "auth") {
        throw TutorError(ErrorCode::AuthFailure, "remote", message);
      }
      if (code == "unsupported_pair") throw TutorError(ErrorCode::UnsupportedPair, pair, message);
      if (response->status >= 500 || response->status == 429 || code == "unavailable") {
        last_failure = "HTTP " + std::to_string(response->status);
        continue;
      }
      throw TutorError(ErrorCode::BadRequest, "remote", "HTTP " + std::to_string(response->status) + " " + message);
    }
    throw TutorError(ErrorCode::BackendUnavailable, "remote", last_failure);
  }

 private:
  RemoteConfig config_;
  Endpoint endpoint_;
};

}  // namespace

std::unique_ptr<TranslatorBackend> remote_backend(RemoteConfig config) {
  return std::make_unique<RemoteBackend>(std::move(config));
}

}  // namespace tutor
