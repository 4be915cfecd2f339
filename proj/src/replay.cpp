#include "tutor/replay.hpp"

#include <vector>

#include "tutor/event_codec.hpp"

namespace tutor {

namespace {

std::optional<std::string> regression(const LearnerState& state, const LearnerEvent& event,
                                      const ModelConfig& config) {
  auto mastered = [&](const std::string& concept_id) {
    auto it = state.mastery.find(concept_id);
    return it != state.mastery.end() && it->second.status == MasteryStatus::Mastered;
  };
  if (const auto* r = std::get_if<RemediationStarted>(&event.payload); r && mastered(r->concept_id)) {
    return "remediation started on mastered concept " + r->concept_id;
  }
  if (const auto* s = std::get_if<TestScored>(&event.payload);
      s && s->phase == TestPhase::PostTest && mastered(s->concept_id) && s->result.level < config.advancement_threshold) {
    return "failing post-test recorded on mastered concept " + s->concept_id;
  }
  return std::nullopt;
}

}  // namespace

ReplayReport verify_events(std::span<const LearnerEvent> events, const ModelConfig& config) {
  ReplayReport report;
  report.events = events.size();

  std::map<std::string, std::vector<LearnerEvent>> by_learner;
  for (const auto& e : events) by_learner[e.learner_id].push_back(e);

  for (const auto& [learner_id, log] : by_learner) {
    LearnerState state;
    for (const auto& event : log) {
      if (auto why = regression(state, event, config)) {
        report.violation = ReplayViolation{"mastery_monotonicity", ErrorCode::WrongPhase, learner_id,
                                           event.sequence_no, *why};
        return report;
      }
      const auto before = state.mastery;
      try {
        state = apply_event(std::move(state), event, config);
      } catch (const TutorError& e) {
        const bool gap = e.code() == ErrorCode::SequenceGap;
        report.violation = ReplayViolation{gap ? "sequence_contiguity" : "state_machine", e.code(), learner_id,
                                           event.sequence_no, e.what()};
        return report;
      }
      for (const auto& [concept_id, record] : before) {
        if (record.status == MasteryStatus::Mastered && state.mastery.at(concept_id).status != MasteryStatus::Mastered) {
          report.violation = ReplayViolation{"mastery_monotonicity", ErrorCode::WrongPhase, learner_id,
                                             event.sequence_no, "mastery of " + concept_id + " regressed"};
          return report;
        }
      }
    }
    const auto first = canonical_state(state);
    const auto second = canonical_state(rebuild(log, config));
    if (first != second) {
      report.violation = ReplayViolation{"rebuild_determinism", ErrorCode::MalformedFile, learner_id,
                                         state.last_sequence, "two rebuilds serialise differently"};
      return report;
    }
    report.states[learner_id] = first;
  }
  return report;
}

ReplayReport verify_log(const std::filesystem::path& path, const ModelConfig& config) {
  std::vector<LearnerEvent> events;
  try {
    events = read_event_log(path);
  } catch (const TutorError& e) {
    ReplayReport report;
    report.violation = ReplayViolation{"decode", e.code(), e.subject(), 0, e.what()};
    return report;
  }
  return verify_events(events, config);
}

}  // namespace tutor
