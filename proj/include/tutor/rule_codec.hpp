#pragma once

#include <filesystem>
#include <optional>

#include "json.hpp"
#include "tutor/rules.hpp"

namespace tutor {

// Rule file format (rules/*.json in a content pack):
//
//   {"rules": [
//     {"rule_id": "remediate", "priority": 50,
//      "conditions": [{"subject": "session", "attribute": "decision", "op": "=", "value": "remediate"}],
//      "actions": [{"emit": {"kind": "Remediate",
//                            "concept": {"fact": "session.concept"},
//                            "style": {"fact": "concept.remediation_style"}}},
//                  {"assert": {"subject": "x", "attribute": "y", "value": true}}]}]}
//
// Values are JSON booleans, integers or strings, or the tagged forms
// {"level": "Good"} and {"style": "DLA"}. Action operands may also be
// {"fact": "subject.attribute"}.

RuleSet parse_rules(const nlohmann::json& doc);
nlohmann::json rules_to_json(const RuleSet& rules);

/// Concatenates every rules/*.json file (sorted by name) under a pack root.
/// Returns nullopt when the pack has no rule files.
std::optional<RuleSet> load_rules(const std::filesystem::path& pack_root);

}  // namespace tutor
