#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tutor/content.hpp"
#include "tutor/levels.hpp"
#include "tutor/style.hpp"

namespace tutor {

enum class TestPhase : std::uint8_t { PreTest, PostTest };

std::string_view phase_name(TestPhase phase);
std::optional<TestPhase> parse_phase(std::string_view name);

struct TestSpec {
  std::string concept_id;
  TestPhase phase = TestPhase::PreTest;
  int question_count = 10;
  KnowledgeLevel learner_level = KnowledgeLevel::Good;
  LearningStyle style = LearningStyle::SensationSeeking;
  std::uint64_t rng_seed = 0;
};

struct TestInstance {
  std::string test_id;
  std::string concept_id;
  TestPhase phase = TestPhase::PreTest;
  std::vector<std::string> question_ids;  // presentation order
  std::vector<int> score_weights;         // parallel to question_ids
  std::int64_t issued_at = 0;
  bool reset_occurred = false;

  friend bool operator==(const TestInstance&, const TestInstance&) = default;
};

struct TestResult {
  std::string test_id;
  std::vector<std::pair<std::string, bool>> correctness;  // instance order
  int total_score = 0;
  int conceptual_score = 0;
  int objective_score = 0;
  KnowledgeLevel level = KnowledgeLevel::Weak;
  KnowledgeLevel conceptual_level = KnowledgeLevel::Weak;
  KnowledgeLevel objective_level = KnowledgeLevel::Weak;
  // An eval-kind with no questions scores 100; these flags surface that.
  bool conceptual_vacuous = false;
  bool objective_vacuous = false;

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

/// max(10, sections) capped at the bank size.
int default_question_count(std::size_t section_count, std::size_t bank_size);

/// Per-level target counts: half at `center`, a quarter one band above and
/// one below, clamped at the scale ends.
std::array<int, 5> difficulty_targets(int count, KnowledgeLevel center);

/// Sum over levels of |selected - target|.
int mix_deviation(const std::array<int, 5>& counts, const std::array<int, 5>& targets);

/// Integer percentage rounded half up; 100 for an empty denominator.
int normalized_score(int earned, int max);

/// Picks an unrepeated, section-covering, level-centred test from `bank`.
/// Falls back to the whole bank (reset_occurred) when the unseen pool is too
/// small. Deterministic in spec.rng_seed.
TestInstance select_questions(std::span<const Question> bank, const TestSpec& spec,
                              const std::set<std::string>& already_seen);

TestResult score_test(const TestInstance& instance, const std::map<std::string, int>& answers,
                      std::span<const Question> bank);

std::pair<KnowledgeLevel, KnowledgeLevel> evaluation_levels(const TestResult& result);

}  // namespace tutor
