#include "tutor/rules.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "tutor/error.hpp"

namespace tutor {

std::string describe(const FactValue& value) {
  struct Describer {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(KnowledgeLevel l) const { return std::string(level_name(l)); }
    std::string operator()(LearningStyle s) const { return std::string(style_code(s)); }
  };
  return std::visit(Describer{}, value);
}

bool WorkingMemory::assert_fact(const std::string& subject, const std::string& attribute, FactValue value) {
  auto [it, inserted] = facts_.try_emplace(FactKey{subject, attribute}, value);
  if (inserted) return true;
  if (it->second == value) return false;
  it->second = std::move(value);
  return true;
}

const FactValue* WorkingMemory::find(const std::string& subject, const std::string& attribute) const {
  auto it = facts_.find(FactKey{subject, attribute});
  return it == facts_.end() ? nullptr : &it->second;
}

namespace {
constexpr std::array<std::string_view, 6> kComparatorSymbols = {"=", "!=", "<", "<=", ">", ">="};
constexpr std::array<std::string_view, 7> kActionNames = {
    "RequestProfile", "GivePreTest", "DeliverLesson", "GivePostTest", "Remediate", "AdvanceTo", "EndCourse"};
}  // namespace

std::string_view comparator_symbol(Comparator c) { return kComparatorSymbols[static_cast<std::size_t>(c)]; }

std::optional<Comparator> parse_comparator(std::string_view symbol) {
  for (std::size_t i = 0; i < kComparatorSymbols.size(); ++i) {
    if (kComparatorSymbols[i] == symbol) return static_cast<Comparator>(i);
  }
  if (symbol == "==") return Comparator::Eq;
  return std::nullopt;
}

std::string_view action_kind_name(ActionKind kind) { return kActionNames[static_cast<std::size_t>(kind)]; }

std::optional<ActionKind> parse_action_kind(std::string_view name) {
  for (std::size_t i = 0; i < kActionNames.size(); ++i) {
    if (kActionNames[i] == name) return static_cast<ActionKind>(i);
  }
  return std::nullopt;
}

bool compare(const FactValue& lhs, Comparator op, const FactValue& rhs) {
  if (op == Comparator::Eq) return lhs == rhs;
  if (op == Comparator::Ne) return lhs != rhs;
  auto ordered = [op](auto a, auto b) {
    switch (op) {
      case Comparator::Lt: return a < b;
      case Comparator::Le: return a <= b;
      case Comparator::Gt: return a > b;
      case Comparator::Ge: return a >= b;
      default: return false;
    }
  };
  if (const auto* a = std::get_if<std::int64_t>(&lhs)) {
    if (const auto* b = std::get_if<std::int64_t>(&rhs)) return ordered(*a, *b);
  }
  if (const auto* a = std::get_if<KnowledgeLevel>(&lhs)) {
    if (const auto* b = std::get_if<KnowledgeLevel>(&rhs)) return ordered(*a, *b);
  }
  return false;
}

bool conditions_hold(const Rule& rule, const WorkingMemory& memory) {
  return std::all_of(rule.conditions.begin(), rule.conditions.end(), [&](const Condition& c) {
    const FactValue* value = memory.find(c.subject, c.attribute);
    return value != nullptr && compare(*value, c.op, c.value);
  });
}

namespace {

std::optional<FactValue> resolve(const Operand& operand, const WorkingMemory& memory) {
  if (const auto* literal = std::get_if<FactValue>(&operand)) return *literal;
  const auto& ref = std::get<FactRef>(operand);
  const FactValue* value = memory.find(ref.subject, ref.attribute);
  return value ? std::optional<FactValue>(*value) : std::nullopt;
}

PedagogicalAction instantiate(const EmitAction& emit, const WorkingMemory& memory) {
  PedagogicalAction action{emit.kind, {}, std::nullopt};
  if (emit.concept_id) {
    if (auto v = resolve(*emit.concept_id, memory)) {
      if (const auto* s = std::get_if<std::string>(&*v)) action.concept_id = *s;
    }
  }
  if (emit.style) {
    if (auto v = resolve(*emit.style, memory)) {
      if (const auto* s = std::get_if<LearningStyle>(&*v)) action.style = *s;
    }
  }
  return action;
}

}  // namespace

Inference infer(const RuleSet& rules, WorkingMemory facts, int max_iterations) {
  if (max_iterations < 1) throw TutorError(ErrorCode::BadRequest, "max_iterations", "must be >= 1");

  std::vector<const Rule*> agenda;
  for (const auto& r : rules) agenda.push_back(&r);
  std::stable_sort(agenda.begin(), agenda.end(), [](const Rule* a, const Rule* b) {
    if (a->priority != b->priority) return a->priority > b->priority;
    return a->rule_id < b->rule_id;
  });

  Inference out;
  out.memory = std::move(facts);
  // Refraction: a rule fires once per instantiation, i.e. per combination of
  // values of the facts its conditions read.
  using Instantiation = std::vector<std::optional<FactValue>>;
  std::set<std::pair<std::size_t, Instantiation>> fired;
  auto instantiation = [&](const Rule& rule) {
    Instantiation values;
    for (const auto& c : rule.conditions) {
      const FactValue* v = out.memory.find(c.subject, c.attribute);
      values.push_back(v ? std::optional<FactValue>(*v) : std::nullopt);
    }
    return values;
  };
  const Rule* winner = nullptr;

  while (true) {
    std::vector<std::pair<std::size_t, Instantiation>> eligible;
    for (std::size_t i = 0; i < agenda.size(); ++i) {
      if (!conditions_hold(*agenda[i], out.memory)) continue;
      auto key = std::make_pair(i, instantiation(*agenda[i]));
      if (!fired.contains(key)) eligible.push_back(std::move(key));
    }
    if (eligible.empty()) break;
    if (++out.rounds > max_iterations) {
      throw TutorError(ErrorCode::IterationLimitExceeded, std::to_string(max_iterations));
    }

    const WorkingMemory before = out.memory;
    for (auto& key : eligible) {
      const Rule& rule = *agenda[key.first];
      fired.insert(std::move(key));
      out.trace.push_back(rule.rule_id);
      for (const auto& action : rule.actions) {
        if (const auto* a = std::get_if<AssertFact>(&action)) {
          if (auto v = resolve(a->value, out.memory)) out.memory.assert_fact(a->subject, a->attribute, *v);
        } else {
          const auto& emit = std::get<EmitAction>(action);
          const bool better = winner == nullptr || winner == &rule || rule.priority > winner->priority ||
                              (rule.priority == winner->priority && rule.rule_id < winner->rule_id);
          if (better) {
            winner = &rule;
            out.action = instantiate(emit, out.memory);
          }
        }
      }
    }
    if (out.memory == before) break;
  }

  if (winner == nullptr) throw TutorError(ErrorCode::NoActionEmitted, std::to_string(out.trace.size()) + " firings");
  return out;
}

// ---------------------------------------------------------------------------
// Default policy
// ---------------------------------------------------------------------------

namespace {

Condition when(std::string subject, std::string attribute, Comparator op, FactValue value) {
  return Condition{std::move(subject), std::move(attribute), op, std::move(value)};
}

Condition is(std::string subject, std::string attribute, FactValue value) {
  return when(std::move(subject), std::move(attribute), Comparator::Eq, std::move(value));
}

FactValue text(const char* s) { return FactValue{std::string(s)}; }

Operand ref(std::string subject, std::string attribute) { return FactRef{std::move(subject), std::move(attribute)}; }

RuleAction emit(ActionKind kind, std::optional<Operand> concept_id = std::nullopt,
                std::optional<Operand> style = std::nullopt) {
  return EmitAction{kind, std::move(concept_id), std::move(style)};
}

}  // namespace

RuleSet default_policy() {
  using enum Comparator;
  RuleSet rules;
  rules.push_back({"profile-first", 100, {is("learner", "profiled", false)}, {emit(ActionKind::RequestProfile)}});
  rules.push_back({"course-complete", 90, {is("learner", "profiled", true), is("course", "all_mastered", true)},
                   {emit(ActionKind::EndCourse)}});
  rules.push_back({"pretest-pending", 80,
                   {is("session", "phase", text("awaiting_pretest")), is("session", "test_pending", true)},
                   {emit(ActionKind::GivePreTest, ref("session", "concept"))}});
  rules.push_back({"pretest-start", 70,
                   {is("learner", "profiled", true), is("session", "phase", text("awaiting_pretest")),
                    is("session", "test_pending", false), is("course", "all_mastered", false)},
                   {emit(ActionKind::GivePreTest, ref("course", "next_concept"))}});
  rules.push_back({"posttest-after-lesson", 65,
                   {is("session", "phase", text("in_lesson")), is("session", "lesson_delivered", true)},
                   {emit(ActionKind::GivePostTest, ref("session", "concept"))}});
  rules.push_back({"posttest-pending", 65,
                   {is("session", "phase", text("awaiting_posttest")), is("session", "test_pending", true)},
                   {emit(ActionKind::GivePostTest, ref("session", "concept"))}});
  rules.push_back({"lesson", 60, {is("session", "phase", text("in_lesson"))},
                   {emit(ActionKind::DeliverLesson, ref("session", "concept"), ref("session", "lesson_style"))}});
  rules.push_back({"advance", 50,
                   {is("session", "phase", text("awaiting_posttest")), is("session", "test_pending", false),
                    is("session", "decision", text("advance")), is("course", "all_mastered", false)},
                   {emit(ActionKind::AdvanceTo, ref("course", "next_concept"))}});
  rules.push_back({"remediate", 50,
                   {is("session", "phase", text("awaiting_posttest")), is("session", "test_pending", false),
                    is("session", "decision", text("remediate"))},
                   {emit(ActionKind::Remediate, ref("session", "concept"), ref("concept", "remediation_style"))}});
  // Repeated failure: make the next post-test one band easier.
  rules.push_back({"ease-after-repeated-failure", 10,
                   {is("session", "phase", text("in_lesson")), when("concept", "attempts", Ge, std::int64_t{3})},
                   {AssertFact{"posttest", "level_shift", FactValue{std::int64_t{-1}}}}});
  return rules;
}

// ---------------------------------------------------------------------------
// Static validation
// ---------------------------------------------------------------------------

std::string_view diagnostic_name(RuleDiagnosticKind kind) {
  switch (kind) {
    case RuleDiagnosticKind::DuplicateRule: return "DuplicateRule";
    case RuleDiagnosticKind::Unsatisfiable: return "Unsatisfiable";
    case RuleDiagnosticKind::DeadRule: return "DeadRule";
    case RuleDiagnosticKind::NoConditions: return "NoConditions";
  }
  return "?";
}

namespace {

template <typename Candidates>
bool any_candidate(const std::vector<Condition>& conditions, const Candidates& candidates) {
  return std::any_of(candidates.begin(), candidates.end(), [&](const auto& c) {
    const FactValue v{c};
    return std::all_of(conditions.begin(), conditions.end(),
                       [&](const Condition& cond) { return compare(v, cond.op, cond.value); });
  });
}

bool integer_satisfiable(const std::vector<Condition>& conditions) {
  using Limits = std::numeric_limits<std::int64_t>;
  std::int64_t lo = Limits::min(), hi = Limits::max();
  std::set<std::int64_t> excluded;
  for (const auto& c : conditions) {
    const auto* v = std::get_if<std::int64_t>(&c.value);
    if (v == nullptr) {
      if (c.op != Comparator::Ne) return false;  // an integer never equals or orders against another kind
      continue;
    }
    switch (c.op) {
      case Comparator::Eq: lo = std::max(lo, *v); hi = std::min(hi, *v); break;
      case Comparator::Ne: excluded.insert(*v); break;
      case Comparator::Lt:
        if (*v == Limits::min()) return false;
        hi = std::min(hi, *v - 1);
        break;
      case Comparator::Le: hi = std::min(hi, *v); break;
      case Comparator::Gt:
        if (*v == Limits::max()) return false;
        lo = std::max(lo, *v + 1);
        break;
      case Comparator::Ge: lo = std::max(lo, *v); break;
    }
  }
  if (lo > hi) return false;
  for (std::int64_t x = lo;; ++x) {
    if (!excluded.contains(x)) return true;
    if (x == hi) return false;
  }
}

bool string_satisfiable(const std::vector<Condition>& conditions) {
  std::optional<std::string> pinned;
  std::set<std::string> excluded;
  for (const auto& c : conditions) {
    const auto* v = std::get_if<std::string>(&c.value);
    if (c.op == Comparator::Ne) {
      if (v) excluded.insert(*v);
      continue;
    }
    if (c.op != Comparator::Eq || v == nullptr) return false;
    if (pinned && *pinned != *v) return false;
    pinned = *v;
  }
  return !pinned || !excluded.contains(*pinned);
}

}  // namespace

bool satisfiable(const std::vector<Condition>& conditions) {
  return any_candidate(conditions, std::array{false, true}) || any_candidate(conditions, kAllLevels) ||
         any_candidate(conditions, kAllStyles) || integer_satisfiable(conditions) ||
         string_satisfiable(conditions);
}

std::vector<RuleDiagnostic> validate_rules(const RuleSet& rules) {
  std::vector<RuleDiagnostic> out;
  std::set<std::string> ids;
  for (const auto& rule : rules) {
    if (!ids.insert(rule.rule_id).second) {
      out.push_back({RuleDiagnosticKind::DuplicateRule, rule.rule_id, "rule id used more than once"});
    }
    if (rule.conditions.empty()) {
      out.push_back({RuleDiagnosticKind::NoConditions, rule.rule_id, "rule has no conditions"});
    }
    std::map<FactKey, std::vector<Condition>> by_fact;
    for (const auto& c : rule.conditions) by_fact[{c.subject, c.attribute}].push_back(c);
    for (const auto& [key, conds] : by_fact) {
      if (!satisfiable(conds)) {
        out.push_back({RuleDiagnosticKind::Unsatisfiable, rule.rule_id,
                       "contradictory conditions on " + key.subject + "." + key.attribute});
      }
    }
    if (rule.actions.empty()) {
      out.push_back({RuleDiagnosticKind::DeadRule, rule.rule_id, "rule neither asserts nor emits"});
    }
  }
  return out;
}

}  // namespace tutor
