#include "tutor/rule_codec.hpp"

#include <algorithm>
#include <fstream>

#include "tutor/error.hpp"

namespace tutor {

using nlohmann::json;

namespace {

FactValue parse_value(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object() && j.contains("level")) {
    if (auto l = parse_level(j.at("level").get<std::string>())) return *l;
  }
  if (j.is_object() && j.contains("style")) {
    if (auto s = parse_style(j.at("style").get<std::string>())) return *s;
  }
  throw TutorError(ErrorCode::MalformedFile, "rule value", j.dump());
}

json value_json(const FactValue& v) {
  struct Encoder {
    json operator()(bool b) const { return b; }
    json operator()(std::int64_t i) const { return i; }
    json operator()(const std::string& s) const { return s; }
    json operator()(KnowledgeLevel l) const { return {{"level", level_name(l)}}; }
    json operator()(LearningStyle s) const { return {{"style", style_code(s)}}; }
  };
  return std::visit(Encoder{}, v);
}

Operand parse_operand(const json& j) {
  if (j.is_object() && j.contains("fact")) {
    const auto path = j.at("fact").get<std::string>();
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw TutorError(ErrorCode::MalformedFile, "fact reference", path);
    return FactRef{path.substr(0, dot), path.substr(dot + 1)};
  }
  return parse_value(j);
}

json operand_json(const Operand& op) {
  if (const auto* r = std::get_if<FactRef>(&op)) return {{"fact", r->subject + "." + r->attribute}};
  return value_json(std::get<FactValue>(op));
}

}  // namespace

RuleSet parse_rules(const json& doc) {
  RuleSet rules;
  try {
    for (const auto& jr : doc.at("rules")) {
      Rule rule;
      rule.rule_id = jr.at("rule_id").get<std::string>();
      rule.priority = jr.value("priority", 0);
      for (const auto& jc : jr.at("conditions")) {
        const auto op_str = jc.at("op").get<std::string>();
        auto op = parse_comparator(op_str);
        if (!op) throw TutorError(ErrorCode::MalformedFile, rule.rule_id, "comparator " + op_str);
        rule.conditions.push_back({jc.at("subject").get<std::string>(), jc.at("attribute").get<std::string>(), *op,
                                   parse_value(jc.at("value"))});
      }
      for (const auto& ja : jr.at("actions")) {
        if (ja.contains("assert")) {
          const auto& a = ja.at("assert");
          rule.actions.push_back(AssertFact{a.at("subject").get<std::string>(), a.at("attribute").get<std::string>(),
                                            parse_operand(a.at("value"))});
        } else if (ja.contains("emit")) {
          const auto& e = ja.at("emit");
          const auto kind_str = e.at("kind").get<std::string>();
          auto kind = parse_action_kind(kind_str);
          if (!kind) throw TutorError(ErrorCode::MalformedFile, rule.rule_id, "action kind " + kind_str);
          EmitAction emit{*kind, std::nullopt, std::nullopt};
          if (e.contains("concept")) emit.concept_id = parse_operand(e.at("concept"));
          if (e.contains("style")) emit.style = parse_operand(e.at("style"));
          rule.actions.push_back(std::move(emit));
        } else {
          throw TutorError(ErrorCode::MalformedFile, rule.rule_id, "action must be assert or emit");
        }
      }
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw TutorError(ErrorCode::MalformedFile, "rules", e.what());
  }
  return rules;
}

json rules_to_json(const RuleSet& rules) {
  json out = json::array();
  for (const auto& rule : rules) {
    json conditions = json::array();
    for (const auto& c : rule.conditions) {
      conditions.push_back({{"subject", c.subject},
                            {"attribute", c.attribute},
                            {"op", comparator_symbol(c.op)},
                            {"value", value_json(c.value)}});
    }
    json actions = json::array();
    for (const auto& a : rule.actions) {
      if (const auto* af = std::get_if<AssertFact>(&a)) {
        actions.push_back(
            {{"assert", {{"subject", af->subject}, {"attribute", af->attribute}, {"value", operand_json(af->value)}}}});
      } else {
        const auto& e = std::get<EmitAction>(a);
        json emit = {{"kind", action_kind_name(e.kind)}};
        if (e.concept_id) emit["concept"] = operand_json(*e.concept_id);
        if (e.style) emit["style"] = operand_json(*e.style);
        actions.push_back({{"emit", emit}});
      }
    }
    out.push_back(
        {{"rule_id", rule.rule_id}, {"priority", rule.priority}, {"conditions", conditions}, {"actions", actions}});
  }
  return {{"rules", out}};
}

std::optional<RuleSet> load_rules(const std::filesystem::path& pack_root) {
  const auto dir = pack_root / "rules";
  if (!std::filesystem::is_directory(dir)) return std::nullopt;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) return std::nullopt;
  std::sort(files.begin(), files.end());
  RuleSet all;
  for (const auto& path : files) {
    std::ifstream in(path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw TutorError(ErrorCode::MalformedFile, path.string(), e.what());
    }
    auto rules = parse_rules(doc);
    all.insert(all.end(), rules.begin(), rules.end());
  }
  return all;
}

}  // namespace tutor
