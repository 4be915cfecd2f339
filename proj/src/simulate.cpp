#include "tutor/simulate.hpp"

#include <omp.h>

#include <iomanip>
#include <memory>
#include <random>
#include <sstream>

#include "tutor/event_codec.hpp"
#include "tutor/tutor.hpp"

namespace tutor {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t learner_seed(const CohortSpec& spec, int index) {
  return splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
}

// 53 random bits mapped to [0, 1).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::map<std::string, int> questionnaire_answers(const ContentPack& pack, LearningStyle bias) {
  std::map<std::string, int> responses;
  for (const auto& item : pack.questionnaire) {
    const int agree = item.scale == bias ? 5 : 2;
    responses[item.item_id] = item.reverse_scored ? 6 - agree : agree;
  }
  return responses;
}

std::map<std::string, int> test_answers(const ContentPack& pack, const Json& test, double ability,
                                        std::mt19937_64& rng) {
  std::map<std::string, int> answers;
  for (const auto& q : test.at("questions")) {
    const auto id = q.at("question_id").get<std::string>();
    const Question* question = pack.find_question(id);
    if (question == nullptr) throw TutorError(ErrorCode::UnknownQuestion, id);
    const int n = static_cast<int>(question->choices.size());
    answers[id] = unit(rng) < ability ? question->correct_index : (question->correct_index + 1) % n;
  }
  return answers;
}

}  // namespace

int LearnerOutcome::mastered() const {
  int n = 0;
  for (const auto& c : concepts) n += c.status == MasteryStatus::Mastered;
  return n;
}

int LearnerOutcome::total_attempts() const {
  int n = 0;
  for (const auto& c : concepts) n += c.attempts;
  return n;
}

int LearnerOutcome::attempted() const {
  int n = 0;
  for (const auto& c : concepts) n += c.attempts > 0;
  return n;
}

SyntheticLearner synthetic_learner(const CohortSpec& spec, int index) {
  SyntheticLearner learner;
  learner.ability = spec.ability;
  learner.style_bias = kAllStyles[learner_seed(spec, index) % kAllStyles.size()];
  return learner;
}

LearnerOutcome run_learner(const ContentPack& pack, const RuleSet& rules, const CohortSpec& spec, int index) {
  if (spec.ability < 0.0 || spec.ability > 1.0) {
    throw TutorError(ErrorCode::OutOfRange, "ability", std::to_string(spec.ability));
  }
  const auto learner = synthetic_learner(spec, index);
  std::mt19937_64 rng(learner_seed(spec, index));

  TutorConfig config;
  config.model = spec.model;
  config.seed_salt = spec.seed;
  config.pbkdf2_iterations = 1;
  config.keep_events = spec.keep_events;
  auto now = std::make_shared<std::int64_t>(1'600'000'000'000);
  Tutor tutor(pack, rules, std::make_shared<IdentityBackend>(), config, [now] { return *now += 1000; });

  LearnerOutcome out;
  out.index = index;
  out.ability = learner.ability;
  out.style_bias = learner.style_bias;
  out.learner_id = tutor.register_learner("sim-" + std::to_string(index), "sim", learner.language);

  auto submit = [&](const Json& test) {
    if (out.steps >= spec.step_cap) return false;
    ++out.steps;
    tutor.submit_test(out.learner_id, test.at("test_id").get<std::string>(),
                      test_answers(pack, test, learner.ability, rng));
    return true;
  };

  while (!out.completed && out.steps < spec.step_cap) {
    ++out.steps;
    const Json step = tutor.next_step(out.learner_id);
    const auto kind = step.at("kind").get<std::string>();
    if (kind == "completed") {
      out.completed = true;
    } else if (kind == "questionnaire") {
      if (out.steps >= spec.step_cap) break;
      ++out.steps;
      tutor.submit_questionnaire(out.learner_id, questionnaire_answers(pack, learner.style_bias));
    } else if (kind == "test") {
      if (!submit(step.at("test"))) break;
    } else if (kind == "lesson" && step.contains("post_test")) {
      if (!submit(step.at("post_test"))) break;
    } else {
      throw TutorError(ErrorCode::ContentUnavailable, out.learner_id, "unexpected step " + kind);
    }
  }
  out.step_cap_exceeded = !out.completed;

  out.final_state = tutor.state(out.learner_id);
  if (out.final_state.style) out.profiled_style = out.final_state.style->dominant;
  for (const auto& id : prerequisite_order(pack)) {
    ConceptOutcome c{id};
    if (auto it = out.final_state.mastery.find(id); it != out.final_state.mastery.end()) {
      c.status = it->second.status;
      c.attempts = it->second.attempts;
      c.pre_level = it->second.pre_level;
      c.post_level = it->second.post_level;
    }
    out.concepts.push_back(std::move(c));
  }
  if (spec.keep_events) out.events = tutor.events(out.learner_id);
  return out;
}

CohortAggregates aggregate(const std::vector<LearnerOutcome>& learners) {
  CohortAggregates a;
  for (const auto& l : learners) {
    ++a.learners;
    a.concepts_total += static_cast<int>(l.concepts.size());
    a.concepts_mastered += l.mastered();
    a.learners_completed += l.completed;
    a.step_cap_exceeded += l.step_cap_exceeded;
    a.attempts_total += l.total_attempts();
    a.concepts_attempted += l.attempted();
  }
  if (a.concepts_total > 0) a.mastery_rate = static_cast<double>(a.concepts_mastered) / a.concepts_total;
  if (a.concepts_attempted > 0) a.mean_attempts = static_cast<double>(a.attempts_total) / a.concepts_attempted;
  return a;
}

CohortReport simulate_serial(const ContentPack& pack, const RuleSet& rules, const CohortSpec& spec) {
  if (spec.count < 1) throw TutorError(ErrorCode::OutOfRange, "count", std::to_string(spec.count));
  CohortReport report{spec, pack.pack_id, {}, {}};
  report.learners.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) report.learners.push_back(run_learner(pack, rules, spec, i));
  report.aggregates = aggregate(report.learners);
  return report;
}

CohortReport simulate_parallel(const ContentPack& pack, const RuleSet& rules, const CohortSpec& spec) {
  if (spec.count < 1) throw TutorError(ErrorCode::OutOfRange, "count", std::to_string(spec.count));
  CohortReport report{spec, pack.pack_id, {}, {}};
  report.learners.resize(static_cast<std::size_t>(spec.count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(spec.count));

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < spec.count; ++i) {
    try {
      report.learners[static_cast<std::size_t>(i)] = run_learner(pack, rules, spec, i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  report.aggregates = aggregate(report.learners);
  return report;
}

namespace {

Json level_or_null(const std::optional<KnowledgeLevel>& level) {
  return level ? Json(level_name(*level)) : Json(nullptr);
}

std::string fixed(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

}  // namespace

Json to_json(const LearnerOutcome& o) {
  Json concepts = Json::array();
  for (const auto& c : o.concepts) {
    concepts.push_back({{"concept_id", c.concept_id},
                        {"status", status_name(c.status)},
                        {"attempts", c.attempts},
                        {"pre_level", level_or_null(c.pre_level)},
                        {"post_level", level_or_null(c.post_level)}});
  }
  return {{"type", "learner"},
          {"index", o.index},
          {"learner_id", o.learner_id},
          {"ability", fixed(o.ability)},
          {"style_bias", style_code(o.style_bias)},
          {"profiled_style", o.profiled_style ? Json(style_code(*o.profiled_style)) : Json(nullptr)},
          {"steps", o.steps},
          {"completed", o.completed},
          {"step_cap_exceeded", o.step_cap_exceeded},
          {"concepts_mastered", o.mastered()},
          {"concepts", concepts}};
}

Json to_json(const CohortAggregates& a) {
  return {{"type", "aggregate"},
          {"learners", a.learners},
          {"concepts_total", a.concepts_total},
          {"concepts_mastered", a.concepts_mastered},
          {"mastery_rate", fixed(a.mastery_rate)},
          {"mean_attempts", fixed(a.mean_attempts)},
          {"learners_completed", a.learners_completed},
          {"step_cap_exceeded", a.step_cap_exceeded}};
}

std::string report_ndjson(const CohortReport& report) {
  std::string out;
  const Json header = {{"type", "cohort"},
                       {"pack_id", report.pack_id},
                       {"count", report.spec.count},
                       {"ability", fixed(report.spec.ability)},
                       {"seed", report.spec.seed},
                       {"step_cap", report.spec.step_cap}};
  out += header.dump() + "\n";
  for (const auto& l : report.learners) out += to_json(l).dump() + "\n";
  out += to_json(report.aggregates).dump() + "\n";
  return out;
}

std::string report_text(const CohortReport& report) {
  std::ostringstream s;
  const auto& a = report.aggregates;
  s << "cohort " << report.pack_id << ": " << report.spec.count << " learners, ability " << fixed(report.spec.ability)
    << ", seed " << report.spec.seed << "\n";
  for (const auto& l : report.learners) {
    s << "  #" << l.index << " " << l.learner_id << " bias=" << style_code(l.style_bias) << " steps=" << l.steps
      << " mastered=" << l.mastered() << "/" << l.concepts.size();
    if (l.step_cap_exceeded) s << " StepCapExceeded";
    s << "\n";
    for (const auto& c : l.concepts) {
      s << "      " << c.concept_id << " " << status_name(c.status) << " attempts=" << c.attempts;
      if (c.post_level) s << " post=" << level_name(*c.post_level);
      s << "\n";
    }
  }
  s << "mastery rate " << fixed(a.mastery_rate) << " (" << a.concepts_mastered << "/" << a.concepts_total
    << "), mean attempts " << fixed(a.mean_attempts) << ", completed " << a.learners_completed << ", step cap hit "
    << a.step_cap_exceeded << "\n";
  return s.str();
}

}  // namespace tutor
