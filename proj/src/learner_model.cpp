#include "tutor/learner_model.hpp"

#include <algorithm>

#include "tutor/error.hpp"

namespace tutor {

std::string_view payload_type(const EventPayload& payload) {
  struct Namer {
    std::string_view operator()(const Registered&) const { return "Registered"; }
    std::string_view operator()(const ProfileUpdated&) const { return "ProfileUpdated"; }
    std::string_view operator()(const TestIssued&) const { return "TestIssued"; }
    std::string_view operator()(const AnswerRecorded&) const { return "AnswerRecorded"; }
    std::string_view operator()(const TestScored&) const { return "TestScored"; }
    std::string_view operator()(const LessonDelivered&) const { return "LessonDelivered"; }
    std::string_view operator()(const ConceptAdvanced&) const { return "ConceptAdvanced"; }
    std::string_view operator()(const RemediationStarted&) const { return "RemediationStarted"; }
    std::string_view operator()(const CourseCompleted&) const { return "CourseCompleted"; }
  };
  return std::visit(Namer{}, payload);
}

std::string_view status_name(MasteryStatus status) {
  switch (status) {
    case MasteryStatus::NotStarted: return "NotStarted";
    case MasteryStatus::InProgress: return "InProgress";
    case MasteryStatus::Mastered: return "Mastered";
  }
  return "?";
}

std::string_view session_phase_name(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::NeedsProfile: return "NeedsProfile";
    case SessionPhase::AwaitingPreTest: return "AwaitingPreTest";
    case SessionPhase::InLesson: return "InLesson";
    case SessionPhase::AwaitingPostTest: return "AwaitingPostTest";
    case SessionPhase::Completed: return "Completed";
  }
  return "?";
}

AdvancementDecision advancement_decision(const MasteryRecord& record, const TestResult& result,
                                         KnowledgeLevel threshold) {
  const bool pass = result.level >= threshold && result.conceptual_level >= threshold &&
                    result.objective_level >= threshold;
  return {pass ? Decision::Advance : Decision::Remediate, record.attempts + 1};
}

std::set<std::string> record_seen(const std::set<std::string>& seen, std::span<const std::string> issued,
                                  bool reset) {
  std::set<std::string> out = reset ? std::set<std::string>{} : seen;
  out.insert(issued.begin(), issued.end());
  return out;
}

namespace {

class Folder {
 public:
  Folder(LearnerState& state, const ModelConfig& config) : state_(state), config_(config) {}

  void operator()(const Registered& e) {
    if (state_.current_session) reject("Registered", "learner already registered");
    state_.language = e.language;
    state_.current_session = SessionState{};
  }

  void operator()(const ProfileUpdated& e) {
    auto& s = session("ProfileUpdated");
    state_.style = e.style;
    if (s.phase == SessionPhase::NeedsProfile) s.phase = SessionPhase::AwaitingPreTest;
  }

  void operator()(const TestIssued& e) {
    auto& s = session("TestIssued");
    const auto& inst = e.instance;
    if (s.pending_test) reject("TestIssued", "a test is already pending");
    const bool pre = inst.phase == TestPhase::PreTest;
    if (pre && s.phase != SessionPhase::AwaitingPreTest) reject("TestIssued", "pre-test outside AwaitingPreTest");
    if (!pre && s.phase != SessionPhase::InLesson) reject("TestIssued", "post-test outside InLesson");
    if (!pre && s.active_concept != inst.concept_id) reject("TestIssued", "post-test for another concept");

    state_.seen_questions[inst.concept_id] =
        record_seen(state_.seen_questions[inst.concept_id], inst.question_ids, inst.reset_occurred);
    auto& record = mastery(inst.concept_id);
    if (record.status == MasteryStatus::NotStarted) record.status = MasteryStatus::InProgress;
    s.active_concept = inst.concept_id;
    s.pending_test = inst;
    s.pending_answers.clear();
    if (!pre) s.phase = SessionPhase::AwaitingPostTest;
  }

  void operator()(const AnswerRecorded& e) {
    auto& s = session("AnswerRecorded");
    if (!s.pending_test || s.pending_test->test_id != e.test_id) reject("AnswerRecorded", "test not pending");
    const auto& ids = s.pending_test->question_ids;
    if (std::find(ids.begin(), ids.end(), e.question_id) == ids.end()) {
      reject("AnswerRecorded", "question not in test");
    }
    s.pending_answers[e.question_id] = e.choice;
  }

  void operator()(const TestScored& e) {
    auto& s = session("TestScored");
    if (!s.pending_test || s.pending_test->test_id != e.result.test_id) reject("TestScored", "test not pending");
    if (s.pending_test->phase != e.phase || s.pending_test->concept_id != e.concept_id) {
      reject("TestScored", "phase or concept mismatch");
    }
    s.pending_test.reset();
    s.pending_answers.clear();
    state_.last_level = e.result.level;
    auto& record = mastery(e.concept_id);
    if (e.phase == TestPhase::PreTest) {
      record.pre_level = e.result.level;
      s.phase = SessionPhase::InLesson;
      s.lesson_style = state_.style ? state_.style->dominant : LearningStyle::SensationSeeking;
      s.lesson_delivered = false;
      return;
    }
    const auto decision = advancement_decision(record, e.result, config_.advancement_threshold);
    ++record.attempts;
    if (record.status != MasteryStatus::Mastered) {
      record.post_level = e.result.level;
      record.conceptual_level = e.result.conceptual_level;
      record.objective_level = e.result.objective_level;
      if (decision.decision == Decision::Advance) record.status = MasteryStatus::Mastered;
    }
    s.last_decision = decision;
  }

  void operator()(const LessonDelivered& e) {
    auto& s = session("LessonDelivered");
    if (s.phase != SessionPhase::InLesson || s.active_concept != e.concept_id) {
      reject("LessonDelivered", "not in a lesson for this concept");
    }
    s.lesson_delivered = true;
    s.lesson_style = e.style;
  }

  void operator()(const ConceptAdvanced& e) {
    auto& s = after_decision("ConceptAdvanced", Decision::Advance);
    s = SessionState{};
    s.phase = SessionPhase::AwaitingPreTest;
    s.active_concept = e.concept_id;
  }

  void operator()(const RemediationStarted& e) {
    auto& s = after_decision("RemediationStarted", Decision::Remediate);
    if (s.active_concept != e.concept_id) reject("RemediationStarted", "concept mismatch");
    s.last_decision.reset();
    s.phase = SessionPhase::InLesson;
    s.lesson_style = e.style;
    s.lesson_delivered = false;
  }

  void operator()(const CourseCompleted&) {
    auto& s = session("CourseCompleted");
    const bool after_advance = s.phase == SessionPhase::AwaitingPostTest && !s.pending_test &&
                               s.last_decision && s.last_decision->decision == Decision::Advance;
    const bool idle = s.phase == SessionPhase::AwaitingPreTest && !s.pending_test;
    if (!after_advance && !idle) reject("CourseCompleted", "course still in progress");
    s = SessionState{};
    s.phase = SessionPhase::Completed;
  }

 private:
  [[noreturn]] void reject(std::string_view event, std::string_view why) const {
    throw TutorError(ErrorCode::WrongPhase, std::string(event), std::string(why));
  }

  SessionState& session(std::string_view event) {
    if (!state_.current_session) reject(event, "learner not registered");
    return *state_.current_session;
  }

  SessionState& after_decision(std::string_view event, Decision expected) {
    auto& s = session(event);
    if (s.phase != SessionPhase::AwaitingPostTest || s.pending_test || !s.last_decision ||
        s.last_decision->decision != expected) {
      reject(event, "no matching post-test decision");
    }
    return s;
  }

  MasteryRecord& mastery(const std::string& concept_id) {
    auto [it, inserted] = state_.mastery.try_emplace(concept_id);
    if (inserted) it->second.concept_id = concept_id;
    return it->second;
  }

  LearnerState& state_;
  const ModelConfig& config_;
};

}  // namespace

LearnerState apply_event(LearnerState state, const LearnerEvent& event, const ModelConfig& config) {
  const auto expected = state.last_sequence + 1;
  if (event.sequence_no != expected) {
    throw TutorError(ErrorCode::SequenceGap, event.learner_id,
                     "expected " + std::to_string(expected) + ", got " + std::to_string(event.sequence_no));
  }
  if (!state.learner_id.empty() && state.learner_id != event.learner_id) {
    throw TutorError(ErrorCode::BadRequest, event.learner_id, "event for another learner");
  }
  state.learner_id = event.learner_id;
  std::visit(Folder{state, config}, event.payload);
  state.last_sequence = event.sequence_no;
  return state;
}

LearnerState rebuild(std::span<const LearnerEvent> events, const ModelConfig& config) {
  LearnerState state;
  for (const auto& e : events) state = apply_event(std::move(state), e, config);
  return state;
}

}  // namespace tutor
