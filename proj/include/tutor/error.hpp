#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tutor {

enum class ErrorCode {
  // style_profiler
  MissingResponse,
  InvalidLikert,
  // knowledge_base
  MissingManifest,
  MalformedFile,
  InvalidField,
  DanglingReference,
  DuplicateId,
  CyclicPrerequisites,
  NoVariant,
  UnknownConcept,
  // assessment
  OutOfRange,
  EmptyBank,
  InfeasibleCount,
  MissingAnswer,
  UnknownQuestion,
  // learner model
  SequenceGap,
  UnknownPayload,
  // rules
  NoActionEmitted,
  IterationLimitExceeded,
  // translation
  UnsupportedPair,
  BackendUnavailable,
  TextTooLong,
  AuthFailure,
  InvalidLanguage,
  // service
  NameTaken,
  UnsupportedLanguage,
  InvalidCredentials,
  InvalidToken,
  WrongPhase,
  UnknownTest,
  ContentUnavailable,
  BadRequest,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code plus
/// the offending subject (an id, a path, a language pair...).
class TutorError : public std::runtime_error {
 public:
  TutorError(ErrorCode code, std::string subject, std::string detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::string& detail() const noexcept { return detail_; }
  bool retryable() const noexcept { return code_ == ErrorCode::BackendUnavailable; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::string detail_;
};

}  // namespace tutor
