#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tutor/assessment.hpp"
#include "tutor/levels.hpp"
#include "tutor/style.hpp"

namespace tutor {

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

struct Registered {
  std::string language;
  friend bool operator==(const Registered&, const Registered&) = default;
};

struct ProfileUpdated {
  StyleVector style;
  friend bool operator==(const ProfileUpdated&, const ProfileUpdated&) = default;
};

struct TestIssued {
  TestInstance instance;  // carries phase and concept_id
  friend bool operator==(const TestIssued&, const TestIssued&) = default;
};

struct AnswerRecorded {
  std::string test_id;
  std::string question_id;
  int choice = 0;
  bool correct = false;
  friend bool operator==(const AnswerRecorded&, const AnswerRecorded&) = default;
};

struct TestScored {
  TestResult result;
  TestPhase phase = TestPhase::PreTest;
  std::string concept_id;
  friend bool operator==(const TestScored&, const TestScored&) = default;
};

struct LessonDelivered {
  std::string concept_id;
  LearningStyle style = LearningStyle::SensationSeeking;
  friend bool operator==(const LessonDelivered&, const LessonDelivered&) = default;
};

/// The learner moves on to `concept_id` (the next concept to study).
struct ConceptAdvanced {
  std::string concept_id;
  friend bool operator==(const ConceptAdvanced&, const ConceptAdvanced&) = default;
};

struct RemediationStarted {
  std::string concept_id;
  int attempt_no = 0;
  LearningStyle style = LearningStyle::SensationSeeking;  // lesson style for the retry
  friend bool operator==(const RemediationStarted&, const RemediationStarted&) = default;
};

struct CourseCompleted {
  friend bool operator==(const CourseCompleted&, const CourseCompleted&) = default;
};

using EventPayload = std::variant<Registered, ProfileUpdated, TestIssued, AnswerRecorded, TestScored,
                                  LessonDelivered, ConceptAdvanced, RemediationStarted, CourseCompleted>;

std::string_view payload_type(const EventPayload& payload);

struct LearnerEvent {
  std::uint64_t sequence_no = 0;
  std::string learner_id;
  std::int64_t timestamp_ms = 0;
  EventPayload payload;

  friend bool operator==(const LearnerEvent&, const LearnerEvent&) = default;
};

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

enum class MasteryStatus : std::uint8_t { NotStarted, InProgress, Mastered };
std::string_view status_name(MasteryStatus status);

struct MasteryRecord {
  std::string concept_id;
  std::optional<KnowledgeLevel> pre_level;
  std::optional<KnowledgeLevel> post_level;
  std::optional<KnowledgeLevel> conceptual_level;
  std::optional<KnowledgeLevel> objective_level;
  int attempts = 0;  // scored post-tests
  MasteryStatus status = MasteryStatus::NotStarted;

  friend bool operator==(const MasteryRecord&, const MasteryRecord&) = default;
};

enum class SessionPhase : std::uint8_t { NeedsProfile, AwaitingPreTest, InLesson, AwaitingPostTest, Completed };
std::string_view session_phase_name(SessionPhase phase);

enum class Decision : std::uint8_t { Advance, Remediate };

struct AdvancementDecision {
  Decision decision = Decision::Advance;
  int attempt_no = 0;
  friend bool operator==(const AdvancementDecision&, const AdvancementDecision&) = default;
};

struct SessionState {
  SessionPhase phase = SessionPhase::NeedsProfile;
  std::optional<std::string> active_concept;
  std::optional<TestInstance> pending_test;
  std::map<std::string, int> pending_answers;
  std::optional<LearningStyle> lesson_style;
  bool lesson_delivered = false;
  // Outcome of the last post-test, until the follow-up transition is logged.
  std::optional<AdvancementDecision> last_decision;

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

struct LearnerState {
  std::string learner_id;
  std::uint64_t last_sequence = 0;
  std::string language;
  std::optional<StyleVector> style;
  std::map<std::string, MasteryRecord> mastery;
  std::map<std::string, std::set<std::string>> seen_questions;
  std::optional<KnowledgeLevel> last_level;  // level of the most recently scored test
  std::optional<SessionState> current_session;

  friend bool operator==(const LearnerState&, const LearnerState&) = default;
};

struct ModelConfig {
  KnowledgeLevel advancement_threshold = KnowledgeLevel::Good;
};

/// Advance iff total, conceptual and objective levels all reach the threshold.
AdvancementDecision advancement_decision(const MasteryRecord& record, const TestResult& result,
                                         KnowledgeLevel threshold = KnowledgeLevel::Good);

/// Seen-set bookkeeping for one issued test: grows the set, or replaces it
/// with exactly the issued ids when the test was drawn after a reset.
std::set<std::string> record_seen(const std::set<std::string>& seen, std::span<const std::string> issued,
                                  bool reset);

/// Pure fold step. Throws SequenceGap for out-of-order events and WrongPhase
/// for events the session state machine does not allow.
LearnerState apply_event(LearnerState state, const LearnerEvent& event, const ModelConfig& config = {});

LearnerState rebuild(std::span<const LearnerEvent> events, const ModelConfig& config = {});

}  // namespace tutor
