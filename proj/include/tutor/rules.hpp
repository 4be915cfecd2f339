#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tutor/levels.hpp"
#include "tutor/style.hpp"

namespace tutor {

using FactValue = std::variant<bool, std::int64_t, std::string, KnowledgeLevel, LearningStyle>;

struct FactKey {
  std::string subject;
  std::string attribute;
  auto operator<=>(const FactKey&) const = default;
};

std::string describe(const FactValue& value);

/// One value per (subject, attribute); asserting again overwrites.
class WorkingMemory {
 public:
  /// Returns true when the stored value changed.
  bool assert_fact(const std::string& subject, const std::string& attribute, FactValue value);
  const FactValue* find(const std::string& subject, const std::string& attribute) const;
  const std::map<FactKey, FactValue>& facts() const { return facts_; }

  friend bool operator==(const WorkingMemory&, const WorkingMemory&) = default;
  friend auto operator<=>(const WorkingMemory& a, const WorkingMemory& b) { return a.facts_ <=> b.facts_; }

 private:
  std::map<FactKey, FactValue> facts_;
};

enum class Comparator : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view comparator_symbol(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view symbol);

/// Equality works across all value kinds (different kinds are unequal).
/// Ordering is defined only between two integers or two levels; any other
/// ordered comparison is false.
bool compare(const FactValue& lhs, Comparator op, const FactValue& rhs);

struct Condition {
  std::string subject;
  std::string attribute;
  Comparator op = Comparator::Eq;
  FactValue value;
  friend bool operator==(const Condition&, const Condition&) = default;
};

/// Reference to a fact, resolved when the action fires.
struct FactRef {
  std::string subject;
  std::string attribute;
  friend bool operator==(const FactRef&, const FactRef&) = default;
};

using Operand = std::variant<FactValue, FactRef>;

enum class ActionKind : std::uint8_t {
  RequestProfile,
  GivePreTest,
  DeliverLesson,
  GivePostTest,
  Remediate,
  AdvanceTo,
  EndCourse,
};
std::string_view action_kind_name(ActionKind kind);
std::optional<ActionKind> parse_action_kind(std::string_view name);

struct PedagogicalAction {
  ActionKind kind = ActionKind::EndCourse;
  std::string concept_id;
  std::optional<LearningStyle> style;
  friend bool operator==(const PedagogicalAction&, const PedagogicalAction&) = default;
};

struct AssertFact {
  std::string subject;
  std::string attribute;
  Operand value;
  friend bool operator==(const AssertFact&, const AssertFact&) = default;
};

struct EmitAction {
  ActionKind kind = ActionKind::EndCourse;
  std::optional<Operand> concept_id;
  std::optional<Operand> style;
  friend bool operator==(const EmitAction&, const EmitAction&) = default;
};

using RuleAction = std::variant<AssertFact, EmitAction>;

struct Rule {
  std::string rule_id;
  int priority = 0;
  std::vector<Condition> conditions;
  std::vector<RuleAction> actions;
  friend bool operator==(const Rule&, const Rule&) = default;
};

using RuleSet = std::vector<Rule>;

bool conditions_hold(const Rule& rule, const WorkingMemory& memory);

struct Inference {
  PedagogicalAction action;
  std::vector<std::string> trace;  // rule ids in firing order
  WorkingMemory memory;            // final working memory
  int rounds = 0;
  friend bool operator==(const Inference&, const Inference&) = default;
};

/// Forward chaining. Each round collects every rule whose conditions hold on
/// the current memory and that has not already fired with the same values
/// for the facts it tests, then fires them in (priority desc, rule_id asc)
/// order. Stops when a round
/// leaves memory unchanged or nothing is eligible. The winning emission is
/// the one from the highest (priority, lowest rule_id) rule; a rule that
/// emitted more than once contributes its latest emission.
///
/// Throws NoActionEmitted or IterationLimitExceeded.
Inference infer(const RuleSet& rules, WorkingMemory facts, int max_iterations = 64);

/// Built-in pedagogy: profile, pre-test, styled lesson, post-test, then
/// advance or remediate. Reads the facts produced by session_facts().
RuleSet default_policy();

enum class RuleDiagnosticKind : std::uint8_t { DuplicateRule, Unsatisfiable, DeadRule, NoConditions };
std::string_view diagnostic_name(RuleDiagnosticKind kind);

struct RuleDiagnostic {
  RuleDiagnosticKind kind;
  std::string rule_id;
  std::string detail;
};

std::vector<RuleDiagnostic> validate_rules(const RuleSet& rules);

/// Whether some single value satisfies every condition in `conditions`
/// (all assumed to be on the same fact).
bool satisfiable(const std::vector<Condition>& conditions);

}  // namespace tutor
