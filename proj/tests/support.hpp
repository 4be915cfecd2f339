#pragma once

// Independent reference implementations ("oracles") and generators shared by
// the unit tests and the acceptance suite. Nothing here calls the code under
// test except where noted.

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tutor/assessment.hpp"
#include "tutor/content.hpp"
#include "tutor/rules.hpp"

namespace tutor::test {

inline std::filesystem::path temp_dir(const std::string& name = "test") {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() / ("tutor-" + name + "-" + std::to_string(rng() % 1'000'000'000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// Levels
// ---------------------------------------------------------------------------

// Straight transcription of the five band ranges.
inline KnowledgeLevel oracle_level(int score) {
  struct Row {
    int lo, hi;
    KnowledgeLevel level;
  };
  static const Row rows[] = {{0, 30, KnowledgeLevel::Weak},
                             {31, 50, KnowledgeLevel::Average},
                             {51, 70, KnowledgeLevel::Good},
                             {71, 85, KnowledgeLevel::VeryGood},
                             {86, 100, KnowledgeLevel::Excellent}};
  for (const auto& r : rows) {
    if (score >= r.lo && score <= r.hi) return r.level;
  }
  throw std::out_of_range("score");
}

// round(100 * earned / max) with halves rounded up, via exact rationals.
inline int oracle_percent(long earned, long max) {
  if (max == 0) return 100;
  long best = 0;
  for (long p = 0; p <= 100; ++p) {
    // |p - 100e/m| <= 1/2  <=>  |2pm - 200e| <= m ; prefer the larger on a tie
    if (std::labs(2 * p * max - 200 * earned) <= max) best = p;
  }
  return static_cast<int>(best);
}

// ---------------------------------------------------------------------------
// Questionnaire
// ---------------------------------------------------------------------------

inline std::array<std::int64_t, 5> oracle_style_scores(const std::vector<QuestionnaireItem>& items,
                                                       const std::map<std::string, int>& responses) {
  std::array<std::int64_t, 5> scores{};
  for (std::size_t s = 0; s < 5; ++s) {
    for (const auto& item : items) {
      if (static_cast<std::size_t>(item.scale) != s) continue;
      const int r = responses.at(item.item_id);
      scores[s] += item.reverse_scored ? (6 - r) : r;
    }
  }
  return scores;
}

inline LearningStyle oracle_dominant(const std::array<std::int64_t, 5>& scores) {
  const auto best = *std::max_element(scores.begin(), scores.end());
  for (std::size_t i = 0; i < 5; ++i) {
    if (scores[i] == best) return static_cast<LearningStyle>(i);
  }
  return LearningStyle::SensationSeeking;
}

// ---------------------------------------------------------------------------
// Question banks and selection
// ---------------------------------------------------------------------------

inline std::vector<Question> random_bank(std::mt19937_64& rng, int size, int sections,
                                         const std::string& concept_id = "c") {
  std::vector<Question> bank;
  for (int i = 0; i < size; ++i) {
    Question q;
    q.question_id = concept_id + "-q" + std::string(i < 10 ? "0" : "") + std::to_string(i);
    q.concept_id = concept_id;
    q.section_id = "s" + std::to_string(rng() % static_cast<unsigned>(sections));
    q.level = static_cast<KnowledgeLevel>(rng() % 5);
    q.score_weight = 1 + static_cast<int>(rng() % 3);
    q.eval_kind = rng() % 2 ? EvalKind::Conceptual : EvalKind::Objective;
    q.stem = {{"en", "stem " + std::to_string(i)}};
    const int choices = 2 + static_cast<int>(rng() % 3);
    for (int c = 0; c < choices; ++c) q.choices.push_back({{"en", "choice " + std::to_string(c)}});
    q.correct_index = static_cast<int>(rng() % static_cast<unsigned>(choices));
    bank.push_back(std::move(q));
  }
  return bank;
}

inline std::array<int, 5> oracle_targets(int count, KnowledgeLevel center) {
  std::array<int, 5> t{};
  const int c = static_cast<int>(center);
  const int quarter = count / 4;
  t[std::min(c + 1, 4)] += quarter;
  t[std::max(c - 1, 0)] += quarter;
  t[c] += count - 2 * quarter;
  return t;
}

inline int oracle_deviation(const std::array<int, 5>& counts, const std::array<int, 5>& targets) {
  int d = 0;
  for (int i = 0; i < 5; ++i) d += std::abs(counts[i] - targets[i]);
  return d;
}

struct SelectionCheck {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Pool the selector must draw from, derived from the rules alone.
inline std::vector<const Question*> oracle_pool(const std::vector<Question>& bank, const std::set<std::string>& seen,
                                                int count, bool& reset) {
  std::vector<const Question*> unseen;
  for (const auto& q : bank) {
    if (!seen.contains(q.question_id)) unseen.push_back(&q);
  }
  reset = static_cast<int>(unseen.size()) < count;
  if (!reset) return unseen;
  std::vector<const Question*> all;
  for (const auto& q : bank) all.push_back(&q);
  return all;
}

inline std::array<int, 5> level_counts(const std::vector<const Question*>& qs) {
  std::array<int, 5> c{};
  for (const auto* q : qs) ++c[static_cast<std::size_t>(q->level)];
  return c;
}

inline bool covers(const std::vector<const Question*>& chosen, const std::set<std::string>& sections) {
  std::set<std::string> got;
  for (const auto* q : chosen) got.insert(q->section_id);
  return std::includes(got.begin(), got.end(), sections.begin(), sections.end());
}

// Re-validates a generated instance against the selection rules: no
// repetition unless a justified reset, section coverage when the count
// permits, and a difficulty mix that no single exchange with the pool can
// improve without losing coverage.
inline SelectionCheck check_selection(const std::vector<Question>& bank, const TestSpec& spec,
                                      const std::set<std::string>& seen, const TestInstance& inst) {
  SelectionCheck out;
  auto fail = [&](std::string why) { out.violations.push_back(std::move(why)); };

  std::map<std::string, const Question*> by_id;
  for (const auto& q : bank) by_id[q.question_id] = &q;

  if (static_cast<int>(inst.question_ids.size()) != spec.question_count) fail("wrong question count");
  if (inst.score_weights.size() != inst.question_ids.size()) fail("weights not parallel to questions");
  std::set<std::string> unique(inst.question_ids.begin(), inst.question_ids.end());
  if (unique.size() != inst.question_ids.size()) fail("duplicate question");

  bool reset = false;
  const auto pool = oracle_pool(bank, seen, spec.question_count, reset);
  if (inst.reset_occurred != reset) fail(reset ? "reset needed but not flagged" : "unjustified reset");

  std::vector<const Question*> chosen;
  for (std::size_t i = 0; i < inst.question_ids.size(); ++i) {
    auto it = by_id.find(inst.question_ids[i]);
    if (it == by_id.end()) {
      fail("question not in bank: " + inst.question_ids[i]);
      return out;
    }
    chosen.push_back(it->second);
    if (i < inst.score_weights.size() && inst.score_weights[i] != it->second->score_weight) fail("weight snapshot");
    if (!reset && seen.contains(inst.question_ids[i])) fail("repeated seen question " + inst.question_ids[i]);
  }

  std::set<std::string> concept_sections, pool_sections;
  for (const auto& q : bank) concept_sections.insert(q.section_id);
  for (const auto* q : pool) pool_sections.insert(q->section_id);
  const bool must_cover = spec.question_count >= static_cast<int>(concept_sections.size());
  if (must_cover && !covers(chosen, pool_sections)) fail("section coverage");

  // Exchange optimality of the difficulty mix.
  const auto targets = oracle_targets(spec.question_count, spec.learner_level);
  const int deviation = oracle_deviation(level_counts(chosen), targets);
  std::set<const Question*> in(chosen.begin(), chosen.end());
  for (std::size_t i = 0; i < chosen.size() && out.ok(); ++i) {
    for (const auto* candidate : pool) {
      if (in.contains(candidate)) continue;
      auto swapped = chosen;
      swapped[i] = candidate;
      if (oracle_deviation(level_counts(swapped), targets) < deviation &&
          (!must_cover || covers(swapped, pool_sections))) {
        fail("mix improvable by swapping " + chosen[i]->question_id + " for " + candidate->question_id);
        break;
      }
    }
  }
  return out;
}

// Smallest deviation over every subset of the pool of the right size that
// keeps coverage when required. Exponential; small pools only.
inline int optimal_deviation(const std::vector<Question>& bank, const TestSpec& spec,
                             const std::set<std::string>& seen) {
  bool reset = false;
  const auto pool = oracle_pool(bank, seen, spec.question_count, reset);
  std::set<std::string> concept_sections, pool_sections;
  for (const auto& q : bank) concept_sections.insert(q.section_id);
  for (const auto* q : pool) pool_sections.insert(q->section_id);
  const bool must_cover = spec.question_count >= static_cast<int>(concept_sections.size());
  const auto targets = oracle_targets(spec.question_count, spec.learner_level);

  int best = 1 << 30;
  const std::size_t n = pool.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != spec.question_count) continue;
    std::vector<const Question*> chosen;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) chosen.push_back(pool[i]);
    }
    if (must_cover && !covers(chosen, pool_sections)) continue;
    best = std::min(best, oracle_deviation(level_counts(chosen), targets));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

// A deliberately naive forward chainer written from the engine's contract:
// rounds of "fire everything eligible, in order, once per memory state".
struct NaiveOutcome {
  bool limit_exceeded = false;
  bool no_action = false;
  PedagogicalAction action;
  std::vector<std::string> trace;
  WorkingMemory memory;
};

inline std::optional<FactValue> naive_resolve(const Operand& op, const WorkingMemory& m) {
  if (const auto* v = std::get_if<FactValue>(&op)) return *v;
  const auto& ref = std::get<FactRef>(op);
  const auto* f = m.find(ref.subject, ref.attribute);
  if (f == nullptr) return std::nullopt;
  return *f;
}

inline bool naive_compare(const FactValue& a, Comparator op, const FactValue& b) {
  if (op == Comparator::Eq) return a == b;
  if (op == Comparator::Ne) return !(a == b);
  long x = 0, y = 0;
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    x = std::get<std::int64_t>(a);
    y = std::get<std::int64_t>(b);
  } else if (std::holds_alternative<KnowledgeLevel>(a) && std::holds_alternative<KnowledgeLevel>(b)) {
    x = static_cast<long>(std::get<KnowledgeLevel>(a));
    y = static_cast<long>(std::get<KnowledgeLevel>(b));
  } else {
    return false;
  }
  switch (op) {
    case Comparator::Lt: return x < y;
    case Comparator::Le: return x <= y;
    case Comparator::Gt: return x > y;
    case Comparator::Ge: return x >= y;
    default: return false;
  }
}

inline NaiveOutcome naive_infer(const RuleSet& rules, WorkingMemory memory, int max_rounds) {
  NaiveOutcome out;
  std::vector<const Rule*> order;
  for (const auto& r : rules) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const Rule* a, const Rule* b) {
    if (a->priority != b->priority) return a->priority > b->priority;
    return a->rule_id < b->rule_id;
  });

  // Refraction per instantiation: the rule plus the values its conditions read.
  std::set<std::pair<std::string, std::vector<FactValue>>> fired;
  auto key_of = [&](const Rule* r) {
    std::vector<FactValue> values;
    for (const auto& c : r->conditions) values.push_back(*memory.find(c.subject, c.attribute));
    return std::make_pair(r->rule_id, values);
  };
  std::map<std::string, PedagogicalAction> emitted;
  int rounds = 0;
  while (true) {
    std::vector<std::pair<const Rule*, std::pair<std::string, std::vector<FactValue>>>> eligible;
    for (const auto* r : order) {
      bool hold = true;
      for (const auto& c : r->conditions) {
        const auto* f = memory.find(c.subject, c.attribute);
        if (f == nullptr || !naive_compare(*f, c.op, c.value)) {
          hold = false;
          break;
        }
      }
      if (hold && !fired.contains(key_of(r))) eligible.push_back({r, key_of(r)});
    }
    if (eligible.empty()) break;
    if (++rounds > max_rounds) {
      out.limit_exceeded = true;
      return out;
    }
    const auto before = memory;
    for (const auto& [r, key] : eligible) {
      fired.insert(key);
      out.trace.push_back(r->rule_id);
      for (const auto& a : r->actions) {
        if (const auto* fact = std::get_if<AssertFact>(&a)) {
          if (auto v = naive_resolve(fact->value, memory)) memory.assert_fact(fact->subject, fact->attribute, *v);
        } else {
          const auto& e = std::get<EmitAction>(a);
          PedagogicalAction act{e.kind, {}, std::nullopt};
          if (e.concept_id) {
            if (auto v = naive_resolve(*e.concept_id, memory); v && std::holds_alternative<std::string>(*v)) {
              act.concept_id = std::get<std::string>(*v);
            }
          }
          if (e.style) {
            if (auto v = naive_resolve(*e.style, memory); v && std::holds_alternative<LearningStyle>(*v)) {
              act.style = std::get<LearningStyle>(*v);
            }
          }
          emitted[r->rule_id] = act;
        }
      }
    }
    if (memory == before) break;
  }
  out.memory = memory;
  for (const auto* r : order) {
    if (auto it = emitted.find(r->rule_id); it != emitted.end()) {
      out.action = it->second;
      return out;
    }
  }
  out.no_action = true;
  return out;
}

// Random rule sets over a tiny fact domain: subjects {a, b}, attributes
// {x, y, z}, values small ints / bools / two levels.
inline FactValue random_value(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return static_cast<std::int64_t>(rng() % 4);
    case 1: return static_cast<bool>(rng() % 2);
    default: return static_cast<KnowledgeLevel>(rng() % 5);
  }
}

inline RuleSet random_rules(std::mt19937_64& rng, int count) {
  static const char* subjects[] = {"a", "b"};
  static const char* attributes[] = {"x", "y", "z"};
  RuleSet rules;
  for (int i = 0; i < count; ++i) {
    Rule r;
    r.rule_id = "r" + std::to_string(i);
    r.priority = static_cast<int>(rng() % 4);
    const int conds = static_cast<int>(rng() % 3);
    for (int c = 0; c < conds; ++c) {
      r.conditions.push_back({subjects[rng() % 2], attributes[rng() % 3], static_cast<Comparator>(rng() % 6),
                              random_value(rng)});
    }
    const int acts = 1 + static_cast<int>(rng() % 2);
    for (int a = 0; a < acts; ++a) {
      if (rng() % 2) {
        Operand value = random_value(rng);
        if (rng() % 4 == 0) value = FactRef{subjects[rng() % 2], attributes[rng() % 3]};
        r.actions.push_back(AssertFact{subjects[rng() % 2], attributes[rng() % 3], value});
      } else {
        EmitAction e;
        e.kind = static_cast<ActionKind>(rng() % 7);
        e.concept_id = Operand{FactValue{std::string("c") + std::to_string(rng() % 3)}};
        r.actions.push_back(e);
      }
    }
    rules.push_back(std::move(r));
  }
  return rules;
}

inline WorkingMemory random_memory(std::mt19937_64& rng) {
  static const char* subjects[] = {"a", "b"};
  static const char* attributes[] = {"x", "y", "z"};
  WorkingMemory m;
  const int n = static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) m.assert_fact(subjects[rng() % 2], attributes[rng() % 3], random_value(rng));
  return m;
}

}  // namespace tutor::test
