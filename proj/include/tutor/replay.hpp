#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "tutor/learner_model.hpp"

namespace tutor {

struct ReplayViolation {
  std::string invariant;  // sequence_contiguity, mastery_monotonicity, state_machine, rebuild_determinism, decode
  ErrorCode code = ErrorCode::MalformedFile;
  std::string learner_id;
  std::int64_t sequence_no = 0;
  std::string message;
};

struct ReplayReport {
  std::size_t events = 0;
  std::map<std::string, std::string> states;  // learner id -> canonical state
  std::optional<ReplayViolation> violation;   // first one found

  bool ok() const { return !violation; }
};

/// Rebuilds every learner in the log and checks sequence contiguity, mastery
/// monotonicity and that two rebuilds serialise identically. Events of
/// different learners may be interleaved.
ReplayReport verify_events(std::span<const LearnerEvent> events, const ModelConfig& config = {});
ReplayReport verify_log(const std::filesystem::path& path, const ModelConfig& config = {});

}  // namespace tutor
