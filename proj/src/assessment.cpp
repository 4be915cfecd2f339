#include "tutor/assessment.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "tutor/error.hpp"

namespace tutor {

std::string_view phase_name(TestPhase phase) {
  return phase == TestPhase::PreTest ? "pre" : "post";
}

std::optional<TestPhase> parse_phase(std::string_view name) {
  if (name == "pre") return TestPhase::PreTest;
  if (name == "post") return TestPhase::PostTest;
  return std::nullopt;
}

int default_question_count(std::size_t section_count, std::size_t bank_size) {
  return static_cast<int>(std::min(std::max<std::size_t>(10, section_count), bank_size));
}

std::array<int, 5> difficulty_targets(int count, KnowledgeLevel center) {
  std::array<int, 5> targets{};
  const int quarter = count / 4;
  targets[static_cast<std::size_t>(shift_level(center, 1))] += quarter;
  targets[static_cast<std::size_t>(shift_level(center, -1))] += quarter;
  targets[static_cast<std::size_t>(center)] += count - 2 * quarter;
  return targets;
}

int mix_deviation(const std::array<int, 5>& counts, const std::array<int, 5>& targets) {
  int d = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) d += std::abs(counts[i] - targets[i]);
  return d;
}

int normalized_score(int earned, int max) {
  if (max <= 0) return 100;
  return (200 * earned + max) / (2 * max);
}

namespace {

// Unbiased draw in [0, bound) by rejection; std::uniform_int_distribution is
// not specified bit-exactly across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

struct Candidate {
  const Question* question;
  std::size_t rank;  // position after the seeded shuffle
};

class Selector {
 public:
  Selector(std::vector<Candidate> pool, int count, KnowledgeLevel center, std::size_t concept_sections)
      : pool_(std::move(pool)),
        count_(count),
        center_(center),
        targets_(difficulty_targets(count, center)),
        chosen_(pool_.size(), false) {
    for (const auto& c : pool_) sections_.insert(c.question->section_id);
    cover_ = static_cast<std::size_t>(count_) >= concept_sections;
  }

  std::vector<const Question*> run() {
    if (cover_) {
      for (const auto& section : sections_) {
        pick_best([&](const Candidate& c) { return c.question->section_id == section; });
      }
    }
    while (picked_ < count_) pick_best([](const Candidate&) { return true; });
    improve_by_swaps();

    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (chosen_[i]) picked.push_back(i);
    }
    // Present easier questions first.
    std::sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
      return std::tie(pool_[a].question->level, pool_[a].rank) <
             std::tie(pool_[b].question->level, pool_[b].rank);
    });
    std::vector<const Question*> out;
    for (auto i : picked) out.push_back(pool_[i].question);
    return out;
  }

 private:
  std::size_t level_index(std::size_t i) const { return static_cast<std::size_t>(pool_[i].question->level); }

  // Lower is better: levels still under target first, then closeness to the
  // learner's level, then shuffled rank.
  std::tuple<int, int, std::size_t> key(std::size_t i) const {
    const auto l = level_index(i);
    const int deficit = targets_[l] - counts_[l];
    const int distance = std::abs(static_cast<int>(l) - static_cast<int>(center_));
    return {deficit > 0 ? 0 : 1, distance, pool_[i].rank};
  }

  template <typename Pred>
  void pick_best(Pred&& pred) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (chosen_[i] || !pred(pool_[i])) continue;
      if (!best || key(i) < key(*best)) best = i;
    }
    if (!best) return;
    chosen_[*best] = true;
    ++counts_[level_index(*best)];
    ++picked_;
  }

  bool swap_keeps_coverage(std::size_t out, std::size_t in) const {
    if (!cover_) return true;
    const auto& section = pool_[out].question->section_id;
    if (pool_[in].question->section_id == section) return true;
    for (std::size_t i = 0; i < pool_.size(); ++i) {
      if (i != out && chosen_[i] && pool_[i].question->section_id == section) return true;
    }
    return false;
  }

  void improve_by_swaps() {
    bool improved = true;
    while (improved) {
      improved = false;
      const int current = mix_deviation(counts_, targets_);
      for (std::size_t out = 0; out < pool_.size() && !improved; ++out) {
        if (!chosen_[out]) continue;
        for (std::size_t in = 0; in < pool_.size() && !improved; ++in) {
          if (chosen_[in] || level_index(in) == level_index(out)) continue;
          auto trial = counts_;
          --trial[level_index(out)];
          ++trial[level_index(in)];
          if (mix_deviation(trial, targets_) < current && swap_keeps_coverage(out, in)) {
            chosen_[out] = false;
            chosen_[in] = true;
            counts_ = trial;
            improved = true;
          }
        }
      }
    }
  }

  std::vector<Candidate> pool_;
  int count_;
  KnowledgeLevel center_;
  std::array<int, 5> targets_;
  std::array<int, 5> counts_{};
  std::vector<bool> chosen_;
  std::set<std::string> sections_;
  bool cover_ = false;
  int picked_ = 0;
};

}  // namespace

TestInstance select_questions(std::span<const Question> bank, const TestSpec& spec,
                              const std::set<std::string>& already_seen) {
  if (bank.empty()) throw TutorError(ErrorCode::EmptyBank, spec.concept_id);
  if (spec.question_count < 1 || static_cast<std::size_t>(spec.question_count) > bank.size()) {
    throw TutorError(ErrorCode::InfeasibleCount, spec.concept_id,
                     std::to_string(spec.question_count) + " of " + std::to_string(bank.size()));
  }

  std::vector<const Question*> ordered;
  std::set<std::string> concept_sections;
  for (const auto& q : bank) {
    ordered.push_back(&q);
    concept_sections.insert(q.section_id);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const Question* a, const Question* b) { return a->question_id < b->question_id; });

  std::vector<const Question*> pool;
  for (const auto* q : ordered) {
    if (!already_seen.contains(q->question_id)) pool.push_back(q);
  }
  const bool reset = pool.size() < static_cast<std::size_t>(spec.question_count);
  if (reset) pool = ordered;

  std::mt19937_64 rng(spec.rng_seed);
  for (std::size_t i = pool.size(); i > 1; --i) {
    std::swap(pool[i - 1], pool[bounded(rng, i)]);
  }
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < pool.size(); ++i) candidates.push_back({pool[i], i});

  Selector selector(std::move(candidates), spec.question_count, spec.learner_level, concept_sections.size());
  TestInstance instance;
  char seed_hex[17];
  std::snprintf(seed_hex, sizeof seed_hex, "%016llx", static_cast<unsigned long long>(spec.rng_seed));
  instance.test_id = spec.concept_id + "-" + std::string(phase_name(spec.phase)) + "-" + seed_hex;
  instance.concept_id = spec.concept_id;
  instance.phase = spec.phase;
  instance.reset_occurred = reset;
  for (const auto* q : selector.run()) {
    instance.question_ids.push_back(q->question_id);
    instance.score_weights.push_back(q->score_weight);
  }
  return instance;
}

TestResult score_test(const TestInstance& instance, const std::map<std::string, int>& answers,
                      std::span<const Question> bank) {
  std::unordered_map<std::string, const Question*> by_id;
  for (const auto& q : bank) by_id.emplace(q.question_id, &q);

  for (const auto& [qid, choice] : answers) {
    if (std::find(instance.question_ids.begin(), instance.question_ids.end(), qid) ==
        instance.question_ids.end()) {
      throw TutorError(ErrorCode::UnknownQuestion, qid, "not part of test " + instance.test_id);
    }
  }

  TestResult result;
  result.test_id = instance.test_id;
  int earned = 0, max = 0;
  std::array<int, 2> kind_earned{}, kind_max{};
  for (std::size_t i = 0; i < instance.question_ids.size(); ++i) {
    const auto& qid = instance.question_ids[i];
    auto q = by_id.find(qid);
    if (q == by_id.end()) throw TutorError(ErrorCode::UnknownQuestion, qid);
    auto a = answers.find(qid);
    if (a == answers.end()) throw TutorError(ErrorCode::MissingAnswer, qid);
    const bool correct = a->second == q->second->correct_index;
    const int weight = i < instance.score_weights.size() ? instance.score_weights[i] : q->second->score_weight;
    const auto kind = static_cast<std::size_t>(q->second->eval_kind);
    result.correctness.emplace_back(qid, correct);
    max += weight;
    kind_max[kind] += weight;
    if (correct) {
      earned += weight;
      kind_earned[kind] += weight;
    }
  }
  result.total_score = normalized_score(earned, max);
  result.conceptual_score = normalized_score(kind_earned[0], kind_max[0]);
  result.objective_score = normalized_score(kind_earned[1], kind_max[1]);
  result.conceptual_vacuous = kind_max[0] == 0;
  result.objective_vacuous = kind_max[1] == 0;
  result.level = classify_level(result.total_score);
  result.conceptual_level = classify_level(result.conceptual_score);
  result.objective_level = classify_level(result.objective_score);
  return result;
}

std::pair<KnowledgeLevel, KnowledgeLevel> evaluation_levels(const TestResult& result) {
  return {result.conceptual_level, result.objective_level};
}

}  // namespace tutor
