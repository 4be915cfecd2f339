#pragma once

#include <memory>
#include <string>

#include "tutor/tutor.hpp"

namespace tutor {

/// HTTP status used for a library error code.
int http_status(ErrorCode code);

/// JSON/HTTP front end for a Tutor under the /v1 prefix:
///
///   POST /v1/register        {name, password, language}  -> {learner_id}
///   POST /v1/login           {name, password}            -> {token}
///   GET  /v1/questionnaire                               -> items (translated)
///   POST /v1/questionnaire   {responses: {item_id: 1..5}} -> style summary
///   GET  /v1/next                                        -> pending step
///   POST /v1/tests/{test_id} {answers: {question_id: i}} -> result
///   GET  /v1/progress                                    -> mastery report
///   POST /v1/chat/translate  {target_language, text}     -> {text}
///
/// Authenticated routes take "Authorization: Bearer <token>". Errors are
/// {"error": {"code", "subject", "message", "retryable"}}.
class ApiServer {
 public:
  explicit ApiServer(Tutor& tutor);
  ~ApiServer();

  /// Binds to an ephemeral port and returns it.
  int bind_to_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tutor
