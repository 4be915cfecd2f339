#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tutor/content.hpp"
#include "tutor/learner_model.hpp"
#include "tutor/rules.hpp"

namespace tutor {

/// A Bernoulli learner: every answer is correct with probability `ability`.
/// Questionnaire answers favour `style_bias`.
struct SyntheticLearner {
  double ability = 1.0;
  LearningStyle style_bias = LearningStyle::DeepLearningAchiever;
  std::string language = "en";
};

struct CohortSpec {
  int count = 10;
  double ability = 1.0;
  std::uint64_t seed = 1;
  int step_cap = 10'000;
  ModelConfig model;
  bool keep_events = false;  // collect each learner's event log in the report
};

struct ConceptOutcome {
  std::string concept_id;
  MasteryStatus status = MasteryStatus::NotStarted;
  int attempts = 0;
  std::optional<KnowledgeLevel> pre_level;
  std::optional<KnowledgeLevel> post_level;
  friend bool operator==(const ConceptOutcome&, const ConceptOutcome&) = default;
};

struct LearnerOutcome {
  int index = 0;
  std::string learner_id;
  double ability = 0.0;
  LearningStyle style_bias = LearningStyle::DeepLearningAchiever;
  std::optional<LearningStyle> profiled_style;
  int steps = 0;
  bool completed = false;
  bool step_cap_exceeded = false;
  std::vector<ConceptOutcome> concepts;  // prerequisite order
  LearnerState final_state;
  std::vector<LearnerEvent> events;  // empty unless CohortSpec::keep_events

  int mastered() const;
  int total_attempts() const;
  int attempted() const;
};

struct CohortAggregates {
  int learners = 0;
  int concepts_total = 0;
  int concepts_mastered = 0;
  int learners_completed = 0;
  int step_cap_exceeded = 0;
  int attempts_total = 0;
  int concepts_attempted = 0;
  double mastery_rate = 0.0;   // concepts_mastered / concepts_total
  double mean_attempts = 0.0;  // attempts_total / concepts_attempted
  friend bool operator==(const CohortAggregates&, const CohortAggregates&) = default;
};

struct CohortReport {
  CohortSpec spec;
  std::string pack_id;
  std::vector<LearnerOutcome> learners;
  CohortAggregates aggregates;
};

/// Learner `index` of a cohort; style bias and answer stream follow from the seed.
SyntheticLearner synthetic_learner(const CohortSpec& spec, int index);

/// Drives one learner through the in-process tutor until the course ends or
/// the step cap is hit. A step is one next_step or submission call.
LearnerOutcome run_learner(const ContentPack& pack, const RuleSet& rules, const CohortSpec& spec, int index);

CohortAggregates aggregate(const std::vector<LearnerOutcome>& learners);

CohortReport simulate_serial(const ContentPack& pack, const RuleSet& rules, const CohortSpec& spec);
CohortReport simulate_parallel(const ContentPack& pack, const RuleSet& rules, const CohortSpec& spec);
inline CohortReport simulate(const ContentPack& pack, const RuleSet& rules, const CohortSpec& spec) {
  return simulate_parallel(pack, rules, spec);
}

/// One header line, one line per learner, one aggregate line.
std::string report_ndjson(const CohortReport& report);
std::string report_text(const CohortReport& report);
nlohmann::ordered_json to_json(const LearnerOutcome& outcome);
nlohmann::ordered_json to_json(const CohortAggregates& aggregates);

}  // namespace tutor
