#include "tutor/error.hpp"

namespace tutor {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingResponse: return "MissingResponse";
    case ErrorCode::InvalidLikert: return "InvalidLikert";
    case ErrorCode::MissingManifest: return "MissingManifest";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::InvalidField: return "InvalidField";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::CyclicPrerequisites: return "CyclicPrerequisites";
    case ErrorCode::NoVariant: return "NoVariant";
    case ErrorCode::UnknownConcept: return "UnknownConcept";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::EmptyBank: return "EmptyBank";
    case ErrorCode::InfeasibleCount: return "InfeasibleCount";
    case ErrorCode::MissingAnswer: return "MissingAnswer";
    case ErrorCode::UnknownQuestion: return "UnknownQuestion";
    case ErrorCode::SequenceGap: return "SequenceGap";
    case ErrorCode::UnknownPayload: return "UnknownPayload";
    case ErrorCode::NoActionEmitted: return "NoActionEmitted";
    case ErrorCode::IterationLimitExceeded: return "IterationLimitExceeded";
    case ErrorCode::UnsupportedPair: return "UnsupportedPair";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::TextTooLong: return "TextTooLong";
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::InvalidLanguage: return "InvalidLanguage";
    case ErrorCode::NameTaken: return "NameTaken";
    case ErrorCode::UnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::InvalidCredentials: return "InvalidCredentials";
    case ErrorCode::InvalidToken: return "InvalidToken";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::UnknownTest: return "UnknownTest";
    case ErrorCode::ContentUnavailable: return "ContentUnavailable";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

TutorError::TutorError(ErrorCode code, std::string subject, std::string detail)
    : std::runtime_error(std::string(to_string(code)) + "(" + subject + ")" +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      subject_(std::move(subject)),
      detail_(std::move(detail)) {}

}  // namespace tutor
