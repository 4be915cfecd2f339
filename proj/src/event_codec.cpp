#include "tutor/event_codec.hpp"

#include <fstream>

#include "tutor/error.hpp"

namespace tutor {

using ojson = nlohmann::ordered_json;

namespace {

template <typename T>
std::optional<T> opt(const ojson& j, const char* key, std::optional<T> (*parse)(std::string_view)) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return parse(j.at(key).get<std::string>());
}

ojson level_or_null(const std::optional<KnowledgeLevel>& level) {
  return level ? ojson(level_name(*level)) : ojson(nullptr);
}

KnowledgeLevel need_level(const ojson& j, const char* key) {
  auto level = parse_level(j.at(key).get<std::string>());
  if (!level) throw TutorError(ErrorCode::MalformedFile, key, "bad level");
  return *level;
}

LearningStyle need_style(const ojson& j, const char* key) {
  auto style = parse_style(j.at(key).get<std::string>());
  if (!style) throw TutorError(ErrorCode::MalformedFile, key, "bad style");
  return *style;
}

TestPhase need_phase(const ojson& j, const char* key) {
  auto phase = parse_phase(j.at(key).get<std::string>());
  if (!phase) throw TutorError(ErrorCode::MalformedFile, key, "bad phase");
  return *phase;
}

struct PayloadEncoder {
  ojson operator()(const Registered& e) const { return {{"language", e.language}}; }
  ojson operator()(const ProfileUpdated& e) const { return {{"style", to_json(e.style)}}; }
  ojson operator()(const TestIssued& e) const {
    return {{"phase", phase_name(e.instance.phase)},
            {"concept_id", e.instance.concept_id},
            {"instance", to_json(e.instance)}};
  }
  ojson operator()(const AnswerRecorded& e) const {
    return {{"test_id", e.test_id}, {"question_id", e.question_id}, {"choice", e.choice}, {"correct", e.correct}};
  }
  ojson operator()(const TestScored& e) const {
    return {{"phase", phase_name(e.phase)}, {"concept_id", e.concept_id}, {"result", to_json(e.result)}};
  }
  ojson operator()(const LessonDelivered& e) const {
    return {{"concept_id", e.concept_id}, {"style", style_code(e.style)}};
  }
  ojson operator()(const ConceptAdvanced& e) const { return {{"concept_id", e.concept_id}}; }
  ojson operator()(const RemediationStarted& e) const {
    return {{"concept_id", e.concept_id}, {"attempt_no", e.attempt_no}, {"style", style_code(e.style)}};
  }
  ojson operator()(const CourseCompleted&) const { return ojson::object(); }
};

EventPayload decode_payload(const std::string& type, const ojson& p) {
  if (type == "Registered") return Registered{p.at("language").get<std::string>()};
  if (type == "ProfileUpdated") return ProfileUpdated{style_vector_from_json(p.at("style"))};
  if (type == "TestIssued") return TestIssued{test_instance_from_json(p.at("instance"))};
  if (type == "AnswerRecorded") {
    return AnswerRecorded{p.at("test_id").get<std::string>(), p.at("question_id").get<std::string>(),
                          p.at("choice").get<int>(), p.at("correct").get<bool>()};
  }
  if (type == "TestScored") {
    return TestScored{test_result_from_json(p.at("result")), need_phase(p, "phase"),
                      p.at("concept_id").get<std::string>()};
  }
  if (type == "LessonDelivered") return LessonDelivered{p.at("concept_id").get<std::string>(), need_style(p, "style")};
  if (type == "ConceptAdvanced") return ConceptAdvanced{p.at("concept_id").get<std::string>()};
  if (type == "RemediationStarted") {
    return RemediationStarted{p.at("concept_id").get<std::string>(), p.at("attempt_no").get<int>(),
                              need_style(p, "style")};
  }
  if (type == "CourseCompleted") return CourseCompleted{};
  throw TutorError(ErrorCode::UnknownPayload, type);
}

}  // namespace

ojson to_json(const StyleVector& v) {
  ojson scores = ojson::object();
  for (auto s : kAllStyles) scores[std::string(style_code(s))] = v.score(s);
  return {{"scores", scores}, {"dominant", style_code(v.dominant)}};
}

StyleVector style_vector_from_json(const ojson& j) {
  StyleVector v;
  const auto& scores = j.at("scores");
  for (auto s : kAllStyles) v.scores[static_cast<std::size_t>(s)] = scores.at(std::string(style_code(s))).get<std::int64_t>();
  v.dominant = need_style(j, "dominant");
  return v;
}

ojson to_json(const TestInstance& t) {
  return {{"test_id", t.test_id},
          {"concept_id", t.concept_id},
          {"phase", phase_name(t.phase)},
          {"question_ids", t.question_ids},
          {"score_weights", t.score_weights},
          {"issued_at", t.issued_at},
          {"reset_occurred", t.reset_occurred}};
}

TestInstance test_instance_from_json(const ojson& j) {
  TestInstance t;
  t.test_id = j.at("test_id").get<std::string>();
  t.concept_id = j.at("concept_id").get<std::string>();
  t.phase = need_phase(j, "phase");
  t.question_ids = j.at("question_ids").get<std::vector<std::string>>();
  t.score_weights = j.at("score_weights").get<std::vector<int>>();
  t.issued_at = j.at("issued_at").get<std::int64_t>();
  t.reset_occurred = j.at("reset_occurred").get<bool>();
  return t;
}

ojson to_json(const TestResult& r) {
  ojson correctness = ojson::array();
  for (const auto& [qid, ok] : r.correctness) correctness.push_back({{"question_id", qid}, {"correct", ok}});
  return {{"test_id", r.test_id},
          {"correctness", correctness},
          {"total_score", r.total_score},
          {"conceptual_score", r.conceptual_score},
          {"objective_score", r.objective_score},
          {"level", level_name(r.level)},
          {"conceptual_level", level_name(r.conceptual_level)},
          {"objective_level", level_name(r.objective_level)},
          {"conceptual_vacuous", r.conceptual_vacuous},
          {"objective_vacuous", r.objective_vacuous}};
}

TestResult test_result_from_json(const ojson& j) {
  TestResult r;
  r.test_id = j.at("test_id").get<std::string>();
  for (const auto& c : j.at("correctness")) {
    r.correctness.emplace_back(c.at("question_id").get<std::string>(), c.at("correct").get<bool>());
  }
  r.total_score = j.at("total_score").get<int>();
  r.conceptual_score = j.at("conceptual_score").get<int>();
  r.objective_score = j.at("objective_score").get<int>();
  r.level = need_level(j, "level");
  r.conceptual_level = need_level(j, "conceptual_level");
  r.objective_level = need_level(j, "objective_level");
  r.conceptual_vacuous = j.at("conceptual_vacuous").get<bool>();
  r.objective_vacuous = j.at("objective_vacuous").get<bool>();
  return r;
}

ojson to_json(const MasteryRecord& m) {
  return {{"concept_id", m.concept_id},
          {"status", status_name(m.status)},
          {"pre_level", level_or_null(m.pre_level)},
          {"post_level", level_or_null(m.post_level)},
          {"conceptual_level", level_or_null(m.conceptual_level)},
          {"objective_level", level_or_null(m.objective_level)},
          {"attempts", m.attempts}};
}

std::string encode_event(const LearnerEvent& event) {
  ojson j;
  j["sequence_no"] = event.sequence_no;
  j["learner_id"] = event.learner_id;
  j["timestamp_ms"] = event.timestamp_ms;
  j["type"] = payload_type(event.payload);
  j["payload"] = std::visit(PayloadEncoder{}, event.payload);
  return j.dump();
}

LearnerEvent decode_event(std::string_view line) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const ojson::exception& e) {
    throw TutorError(ErrorCode::MalformedFile, "event", e.what());
  }
  try {
    LearnerEvent event;
    event.sequence_no = j.at("sequence_no").get<std::uint64_t>();
    event.learner_id = j.at("learner_id").get<std::string>();
    event.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    event.payload = decode_payload(j.at("type").get<std::string>(), j.at("payload"));
    return event;
  } catch (const ojson::exception& e) {
    throw TutorError(ErrorCode::MalformedFile, "event", e.what());
  }
}

std::vector<LearnerEvent> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TutorError(ErrorCode::MalformedFile, path.string(), "cannot open");
  std::vector<LearnerEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(decode_event(line));
  }
  return events;
}

std::string canonical_state(const LearnerState& state) {
  ojson j;
  j["learner_id"] = state.learner_id;
  j["last_sequence"] = state.last_sequence;
  j["language"] = state.language;
  j["style"] = state.style ? to_json(*state.style) : ojson(nullptr);
  ojson mastery = ojson::array();
  for (const auto& [id, record] : state.mastery) mastery.push_back(to_json(record));
  j["mastery"] = mastery;
  ojson seen = ojson::object();
  for (const auto& [id, ids] : state.seen_questions) seen[id] = ids;
  j["seen_questions"] = seen;
  j["last_level"] = level_or_null(state.last_level);
  if (state.current_session) {
    const auto& s = *state.current_session;
    ojson session;
    session["phase"] = session_phase_name(s.phase);
    session["active_concept"] = s.active_concept ? ojson(*s.active_concept) : ojson(nullptr);
    session["pending_test"] = s.pending_test ? to_json(*s.pending_test) : ojson(nullptr);
    session["pending_answers"] = s.pending_answers;
    session["lesson_style"] = s.lesson_style ? ojson(style_code(*s.lesson_style)) : ojson(nullptr);
    session["lesson_delivered"] = s.lesson_delivered;
    if (s.last_decision) {
      session["last_decision"] = {
          {"decision", s.last_decision->decision == Decision::Advance ? "advance" : "remediate"},
          {"attempt_no", s.last_decision->attempt_no}};
    } else {
      session["last_decision"] = nullptr;
    }
    j["current_session"] = session;
  } else {
    j["current_session"] = nullptr;
  }
  return j.dump();
}

}  // namespace tutor
