#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tutor/assessment.hpp"
#include "tutor/learner_model.hpp"

namespace tutor {

// Event log lines are JSON objects with a fixed field order:
//   {"sequence_no":N,"learner_id":"...","timestamp_ms":T,"type":"...","payload":{...}}
// Payload fields also appear in declaration order, so encoding is canonical.

std::string encode_event(const LearnerEvent& event);

/// Throws MalformedFile on bad JSON or missing fields, UnknownPayload on an
/// unrecognised "type".
LearnerEvent decode_event(std::string_view line);

/// Reads a whole NDJSON log. Blank lines are ignored.
std::vector<LearnerEvent> read_event_log(const std::filesystem::path& path);

/// Deterministic JSON rendering of a learner state, used to compare live
/// and rebuilt states.
std::string canonical_state(const LearnerState& state);

nlohmann::ordered_json to_json(const StyleVector& v);
StyleVector style_vector_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const TestInstance& instance);
TestInstance test_instance_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const TestResult& result);
TestResult test_result_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const MasteryRecord& record);

}  // namespace tutor
