#include "tutor/http_api.hpp"

#include "httplib.h"
#include "tutor/error.hpp"

namespace tutor {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidToken:
    case ErrorCode::InvalidCredentials:
      return 401;
    case ErrorCode::UnknownTest:
    case ErrorCode::UnknownConcept:
      return 404;
    case ErrorCode::NameTaken:
    case ErrorCode::WrongPhase:
      return 409;
    case ErrorCode::MissingResponse:
    case ErrorCode::InvalidLikert:
    case ErrorCode::MissingAnswer:
    case ErrorCode::UnknownQuestion:
    case ErrorCode::UnsupportedLanguage:
    case ErrorCode::InvalidLanguage:
    case ErrorCode::UnsupportedPair:
    case ErrorCode::TextTooLong:
    case ErrorCode::BadRequest:
      return 400;
    case ErrorCode::BackendUnavailable:
    case ErrorCode::AuthFailure:
      return 503;
    default:
      return 500;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, const TutorError& e) {
  send_json(res, http_status(e.code()),
            Json{{"error",
                  {{"code", to_string(e.code())},
                   {"subject", e.subject()},
                   {"message", e.what()},
                   {"retryable", e.retryable()}}}});
}

Json parse_body(const httplib::Request& req) {
  try {
    auto body = Json::parse(req.body.empty() ? "{}" : req.body);
    if (!body.is_object()) throw TutorError(ErrorCode::BadRequest, "body", "expected a JSON object");
    return body;
  } catch (const Json::exception& e) {
    throw TutorError(ErrorCode::BadRequest, "body", e.what());
  }
}

std::string field(const Json& body, const char* name) {
  if (!body.contains(name) || !body.at(name).is_string()) {
    throw TutorError(ErrorCode::BadRequest, name, "missing string field");
  }
  return body.at(name).get<std::string>();
}

std::map<std::string, int> int_map(const Json& body, const char* name) {
  if (!body.contains(name) || !body.at(name).is_object()) {
    throw TutorError(ErrorCode::BadRequest, name, "missing object field");
  }
  std::map<std::string, int> out;
  for (const auto& [key, value] : body.at(name).items()) {
    if (!value.is_number_integer()) throw TutorError(ErrorCode::BadRequest, key, "expected an integer");
    out[key] = value.get<int>();
  }
  return out;
}

}  // namespace

struct ApiServer::Impl {
  explicit Impl(Tutor& t) : tutor(t) { routes(); }

  std::string learner(const httplib::Request& req) const {
    const auto header = req.get_header_value("Authorization");
    constexpr std::string_view kBearer = "Bearer ";
    if (header.rfind(kBearer, 0) != 0) throw TutorError(ErrorCode::InvalidToken, "Authorization");
    return tutor.authenticate(header.substr(kBearer.size()));
  }

  template <typename Fn>
  httplib::Server::Handler handle(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        send_json(res, 200, fn(req));
      } catch (const TutorError& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_json(res, 500, Json{{"error", {{"code", "Internal"}, {"message", e.what()}, {"retryable", false}}}});
      }
    };
  }

  void routes() {
    server.Post("/v1/register", handle([this](const httplib::Request& req) {
      const auto body = parse_body(req);
      return Json{{"learner_id",
                   tutor.register_learner(field(body, "name"), field(body, "password"), field(body, "language"))}};
    }));
    server.Post("/v1/login", handle([this](const httplib::Request& req) {
      const auto body = parse_body(req);
      return Json{{"token", tutor.login(field(body, "name"), field(body, "password"))}};
    }));
    server.Get("/v1/questionnaire", handle([this](const httplib::Request& req) {
      return tutor.questionnaire(learner(req));
    }));
    server.Post("/v1/questionnaire", handle([this](const httplib::Request& req) {
      const auto id = learner(req);
      return tutor.submit_questionnaire(id, int_map(parse_body(req), "responses"));
    }));
    server.Get("/v1/next", handle([this](const httplib::Request& req) { return tutor.next_step(learner(req)); }));
    server.Post(R"(/v1/tests/([^/]+))", handle([this](const httplib::Request& req) {
      const auto id = learner(req);
      return tutor.submit_test(id, req.matches[1].str(), int_map(parse_body(req), "answers"));
    }));
    server.Get("/v1/progress", handle([this](const httplib::Request& req) { return tutor.progress(learner(req)); }));
    server.Post("/v1/chat/translate", handle([this](const httplib::Request& req) {
      const auto id = learner(req);
      const auto body = parse_body(req);
      return Json{{"text", tutor.chat_translate(id, field(body, "target_language"), field(body, "text"))}};
    }));
  }

  Tutor& tutor;
  httplib::Server server;
};

ApiServer::ApiServer(Tutor& tutor) : impl_(std::make_unique<Impl>(tutor)) {}
ApiServer::~ApiServer() = default;

int ApiServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool ApiServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }
bool ApiServer::listen_after_bind() { return impl_->server.listen_after_bind(); }
void ApiServer::stop() { impl_->server.stop(); }
void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace tutor
