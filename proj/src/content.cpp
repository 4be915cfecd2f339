#include "tutor/content.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <queue>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tutor {

namespace fs = std::filesystem;
using nlohmann::json;

bool Concept::has_section(const std::string& section_id) const {
  return std::find(sections.begin(), sections.end(), section_id) != sections.end();
}

std::string_view eval_kind_name(EvalKind kind) {
  return kind == EvalKind::Conceptual ? "conceptual" : "objective";
}

std::optional<EvalKind> parse_eval_kind(std::string_view name) {
  if (name == "conceptual") return EvalKind::Conceptual;
  if (name == "objective") return EvalKind::Objective;
  return std::nullopt;
}

const Concept* ContentPack::find_concept(const std::string& concept_id) const {
  auto it = std::lower_bound(concepts.begin(), concepts.end(), concept_id,
                             [](const Concept& c, const std::string& id) { return c.concept_id < id; });
  return it != concepts.end() && it->concept_id == concept_id ? &*it : nullptr;
}

const Question* ContentPack::find_question(const std::string& question_id) const {
  auto it = std::lower_bound(questions.begin(), questions.end(), question_id,
                             [](const Question& q, const std::string& id) { return q.question_id < id; });
  return it != questions.end() && it->question_id == question_id ? &*it : nullptr;
}

namespace {

bool valid_language(const std::string& code) {
  static const std::regex kPattern("[a-z]{2,3}");
  return std::regex_match(code, kPattern);
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw TutorError(ErrorCode::MalformedFile, path.string(), "cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw TutorError(ErrorCode::MalformedFile, path.string(), e.what());
  }
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw TutorError(ErrorCode::MalformedFile, path.string(), "write failed");
}

LocalizedText parse_text(const json& j) {
  LocalizedText text;
  for (const auto& [lang, value] : j.items()) text[lang] = value.get<std::string>();
  return text;
}

json text_json(const LocalizedText& text) {
  json j = json::object();
  for (const auto& [lang, value] : text) j[lang] = value;
  return j;
}

std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Runs `fn`, turning JSON type errors into a MalformedFile diagnostic.
template <typename Fn>
void parse_into(const fs::path& path, std::vector<PackDiagnostic>& diags, Fn&& fn) {
  try {
    fn(read_json(path));
  } catch (const TutorError& e) {
    diags.push_back({e.code(), e.subject(), e.detail()});
  } catch (const json::exception& e) {
    diags.push_back({ErrorCode::MalformedFile, path.string(), e.what()});
  }
}

Question parse_question(const json& j, const std::string& concept_id) {
  Question q;
  q.question_id = j.at("question_id").get<std::string>();
  q.concept_id = concept_id;
  q.section_id = j.at("section_id").get<std::string>();
  const auto level_name_str = j.at("level").get<std::string>();
  auto level = parse_level(level_name_str);
  if (!level) throw TutorError(ErrorCode::InvalidField, q.question_id, "level " + level_name_str);
  q.level = *level;
  q.score_weight = j.at("score_weight").get<int>();
  const auto kind_str = j.at("eval_kind").get<std::string>();
  auto kind = parse_eval_kind(kind_str);
  if (!kind) throw TutorError(ErrorCode::InvalidField, q.question_id, "eval_kind " + kind_str);
  q.eval_kind = *kind;
  q.stem = parse_text(j.at("stem"));
  for (const auto& choice : j.at("choices")) q.choices.push_back(parse_text(choice));
  q.correct_index = j.at("correct_index").get<int>();
  return q;
}

void check_text(const LocalizedText& text, const std::string& owner, const std::string& default_language,
                std::vector<PackDiagnostic>& diags) {
  if (!text.contains(default_language)) {
    diags.push_back({ErrorCode::InvalidField, owner, "missing text for default language " + default_language});
  }
  for (const auto& [lang, value] : text) {
    if (!valid_language(lang)) diags.push_back({ErrorCode::InvalidField, owner, "language code " + lang});
  }
}

}  // namespace

void canonicalize(ContentPack& pack) {
  std::sort(pack.concepts.begin(), pack.concepts.end(),
            [](const Concept& a, const Concept& b) { return a.concept_id < b.concept_id; });
  std::sort(pack.lessons.begin(), pack.lessons.end(), [](const LessonVariant& a, const LessonVariant& b) {
    return std::tie(a.concept_id, a.style) < std::tie(b.concept_id, b.style);
  });
  std::sort(pack.questions.begin(), pack.questions.end(),
            [](const Question& a, const Question& b) { return a.question_id < b.question_id; });
  std::sort(pack.questionnaire.begin(), pack.questionnaire.end(),
            [](const QuestionnaireItem& a, const QuestionnaireItem& b) { return a.item_id < b.item_id; });
}

std::vector<PackDiagnostic> validate_pack(const ContentPack& pack) {
  std::vector<PackDiagnostic> diags;
  const auto& lang = pack.default_language;
  if (!valid_language(lang)) diags.push_back({ErrorCode::InvalidField, "pack", "default_language " + lang});

  std::set<std::string> concept_ids;
  for (const auto& c : pack.concepts) {
    if (!concept_ids.insert(c.concept_id).second) diags.push_back({ErrorCode::DuplicateId, c.concept_id, "concept"});
    if (c.sections.empty()) diags.push_back({ErrorCode::InvalidField, c.concept_id, "concept has no sections"});
    std::set<std::string> sections;
    for (const auto& s : c.sections) {
      if (!sections.insert(s).second) diags.push_back({ErrorCode::DuplicateId, s, "section of " + c.concept_id});
    }
    check_text(c.title, c.concept_id, lang, diags);
  }
  for (const auto& c : pack.concepts) {
    for (const auto& p : c.prerequisites) {
      if (!concept_ids.contains(p)) {
        diags.push_back({ErrorCode::DanglingReference, p, "prerequisite of concept " + c.concept_id});
      }
    }
  }

  // Prerequisite cycles: DFS in id order, reporting the first cycle found.
  {
    std::map<std::string, const Concept*> by_id;
    for (const auto& c : pack.concepts) by_id.emplace(c.concept_id, &c);
    std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
    std::vector<std::string> stack;
    std::optional<std::string> cycle;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
      if (cycle) return;
      color[id] = 1;
      stack.push_back(id);
      auto prereqs = by_id.at(id)->prerequisites;
      std::sort(prereqs.begin(), prereqs.end());
      for (const auto& p : prereqs) {
        if (!by_id.contains(p) || cycle) continue;
        if (color[p] == 1) {
          auto start = std::find(stack.begin(), stack.end(), p);
          std::string path;
          for (auto it = start; it != stack.end(); ++it) path += *it + "->";
          cycle = path + p;
          return;
        }
        if (color[p] == 0) visit(p);
      }
      stack.pop_back();
      color[id] = 2;
    };
    for (const auto& [id, c] : by_id) {
      if (color[id] == 0) visit(id);
    }
    if (cycle) diags.push_back({ErrorCode::CyclicPrerequisites, *cycle, "prerequisite cycle"});
  }

  std::set<std::pair<std::string, LearningStyle>> variants;
  for (const auto& v : pack.lessons) {
    const std::string owner = v.concept_id + "." + std::string(style_code(v.style));
    if (!concept_ids.contains(v.concept_id)) {
      diags.push_back({ErrorCode::DanglingReference, v.concept_id, "lesson " + owner});
    }
    if (!variants.emplace(v.concept_id, v.style).second) diags.push_back({ErrorCode::DuplicateId, owner, "lesson"});
    if (v.body.empty()) diags.push_back({ErrorCode::InvalidField, owner, "lesson has no blocks"});
    for (const auto& block : v.body) {
      if (!valid_language(block.language)) {
        diags.push_back({ErrorCode::InvalidField, owner, "block language " + block.language});
      }
    }
  }

  std::set<std::string> question_ids;
  for (const auto& q : pack.questions) {
    if (!question_ids.insert(q.question_id).second) diags.push_back({ErrorCode::DuplicateId, q.question_id, "question"});
    const Concept* c = pack.find_concept(q.concept_id);
    if (c == nullptr) {
      // find_concept relies on sorted concepts; fall back to a scan for unsorted packs.
      auto it = std::find_if(pack.concepts.begin(), pack.concepts.end(),
                             [&](const Concept& x) { return x.concept_id == q.concept_id; });
      c = it == pack.concepts.end() ? nullptr : &*it;
    }
    if (c == nullptr) {
      diags.push_back({ErrorCode::DanglingReference, q.concept_id, "concept of question " + q.question_id});
    } else if (!c->has_section(q.section_id)) {
      diags.push_back({ErrorCode::DanglingReference, q.section_id, "section of question " + q.question_id});
    }
    if (q.score_weight < 1) diags.push_back({ErrorCode::InvalidField, q.question_id, "score_weight < 1"});
    if (q.choices.size() < 2) diags.push_back({ErrorCode::InvalidField, q.question_id, "fewer than two choices"});
    if (q.correct_index < 0 || q.correct_index >= static_cast<int>(q.choices.size())) {
      diags.push_back({ErrorCode::InvalidField, q.question_id, "correct_index out of range"});
    }
    check_text(q.stem, q.question_id, lang, diags);
    for (const auto& choice : q.choices) check_text(choice, q.question_id, lang, diags);
  }

  std::set<std::string> item_ids;
  for (const auto& item : pack.questionnaire) {
    if (!item_ids.insert(item.item_id).second) diags.push_back({ErrorCode::DuplicateId, item.item_id, "questionnaire item"});
    check_text(item.prompt, item.item_id, lang, diags);
  }
  return diags;
}

PackLoadReport load_pack_checked(const fs::path& root) {
  PackLoadReport report;
  auto& diags = report.diagnostics;
  const fs::path manifest = root / "pack.json";
  if (!fs::is_regular_file(manifest)) {
    diags.push_back({ErrorCode::MissingManifest, manifest.string(), "no manifest"});
    return report;
  }

  ContentPack pack;
  parse_into(manifest, diags, [&](const json& j) {
    pack.pack_id = j.at("pack_id").get<std::string>();
    pack.version = j.at("version").get<std::string>();
    pack.default_language = j.at("default_language").get<std::string>();
  });
  if (!diags.empty()) return report;

  for (const auto& path : json_files(root / "concepts")) {
    parse_into(path, diags, [&](const json& j) {
      Concept c;
      c.concept_id = j.at("concept_id").get<std::string>();
      if (c.concept_id != path.stem().string()) {
        throw TutorError(ErrorCode::InvalidField, path.string(), "concept_id does not match file name");
      }
      c.title = parse_text(j.at("title"));
      c.sections = j.at("sections").get<std::vector<std::string>>();
      c.prerequisites = j.value("prerequisites", std::vector<std::string>{});
      pack.concepts.push_back(std::move(c));
    });
  }

  for (const auto& path : json_files(root / "lessons")) {
    // lessons/<concept_id>.<STYLE>.json
    const std::string stem = path.stem().string();
    const auto dot = stem.rfind('.');
    const auto style = dot == std::string::npos ? std::nullopt : parse_style(stem.substr(dot + 1));
    if (!style) {
      diags.push_back({ErrorCode::InvalidField, path.string(), "lesson file name must be <concept>.<style>.json"});
      continue;
    }
    parse_into(path, diags, [&](const json& j) {
      LessonVariant v;
      v.concept_id = stem.substr(0, dot);
      v.style = *style;
      for (const auto& block : j.at("blocks")) {
        v.body.push_back({block.at("language").get<std::string>(), block.at("text").get<std::string>()});
      }
      pack.lessons.push_back(std::move(v));
    });
  }

  for (const auto& path : json_files(root / "questions")) {
    parse_into(path, diags, [&](const json& j) {
      const std::string concept_id = path.stem().string();
      for (const auto& q : j.at("questions")) pack.questions.push_back(parse_question(q, concept_id));
    });
  }

  const fs::path items = root / "questionnaire" / "items.json";
  if (fs::is_regular_file(items)) {
    parse_into(items, diags, [&](const json& j) {
      for (const auto& entry : j.at("items")) {
        QuestionnaireItem item;
        item.item_id = entry.at("item_id").get<std::string>();
        item.prompt = parse_text(entry.at("prompt"));
        const auto scale = entry.at("scale").get<std::string>();
        auto style = parse_style(scale);
        if (!style) throw TutorError(ErrorCode::InvalidField, item.item_id, "scale " + scale);
        item.scale = *style;
        item.reverse_scored = entry.value("reverse_scored", false);
        pack.questionnaire.push_back(std::move(item));
      }
    });
  }
  if (!diags.empty()) return report;

  canonicalize(pack);
  diags = validate_pack(pack);
  if (diags.empty()) report.pack = std::move(pack);
  return report;
}

ContentPack load_pack(const fs::path& root) {
  auto report = load_pack_checked(root);
  if (!report.diagnostics.empty()) {
    const auto& d = report.diagnostics.front();
    throw TutorError(d.code, d.subject, d.detail);
  }
  return std::move(*report.pack);
}

void write_pack(const ContentPack& pack, const fs::path& root) {
  fs::create_directories(root / "concepts");
  fs::create_directories(root / "lessons");
  fs::create_directories(root / "questions");
  fs::create_directories(root / "questionnaire");
  write_json(root / "pack.json", json{{"pack_id", pack.pack_id},
                                      {"version", pack.version},
                                      {"default_language", pack.default_language}});
  for (const auto& c : pack.concepts) {
    write_json(root / "concepts" / (c.concept_id + ".json"),
               json{{"concept_id", c.concept_id},
                    {"title", text_json(c.title)},
                    {"sections", c.sections},
                    {"prerequisites", c.prerequisites}});
  }
  for (const auto& v : pack.lessons) {
    json blocks = json::array();
    for (const auto& b : v.body) blocks.push_back({{"language", b.language}, {"text", b.text}});
    write_json(root / "lessons" / (v.concept_id + "." + std::string(style_code(v.style)) + ".json"),
               json{{"blocks", blocks}});
  }
  std::map<std::string, json> by_concept;
  for (const auto& q : pack.questions) {
    json choices = json::array();
    for (const auto& c : q.choices) choices.push_back(text_json(c));
    by_concept[q.concept_id].push_back({{"question_id", q.question_id},
                                        {"section_id", q.section_id},
                                        {"level", level_name(q.level)},
                                        {"score_weight", q.score_weight},
                                        {"eval_kind", eval_kind_name(q.eval_kind)},
                                        {"stem", text_json(q.stem)},
                                        {"choices", choices},
                                        {"correct_index", q.correct_index}});
  }
  for (const auto& [concept_id, questions] : by_concept) {
    write_json(root / "questions" / (concept_id + ".json"), json{{"questions", questions}});
  }
  json items = json::array();
  for (const auto& item : pack.questionnaire) {
    items.push_back({{"item_id", item.item_id},
                     {"prompt", text_json(item.prompt)},
                     {"scale", style_code(item.scale)},
                     {"reverse_scored", item.reverse_scored}});
  }
  write_json(root / "questionnaire" / "items.json", json{{"items", items}});
}

bool has_variant(const ContentPack& pack, const std::string& concept_id, LearningStyle style) {
  return std::any_of(pack.lessons.begin(), pack.lessons.end(), [&](const LessonVariant& v) {
    return v.concept_id == concept_id && v.style == style;
  });
}

const LessonVariant& variant_for(const ContentPack& pack, const std::string& concept_id, LearningStyle style) {
  if (pack.find_concept(concept_id) == nullptr) throw TutorError(ErrorCode::UnknownConcept, concept_id);
  auto find = [&](LearningStyle s) -> const LessonVariant* {
    for (const auto& v : pack.lessons) {
      if (v.concept_id == concept_id && v.style == s) return &v;
    }
    return nullptr;
  };
  if (const auto* exact = find(style)) return *exact;
  for (LearningStyle s : kStyleFallbackChain) {
    if (const auto* v = find(s)) return *v;
  }
  throw TutorError(ErrorCode::NoVariant, concept_id);
}

std::vector<Question> bank_for(const ContentPack& pack, const std::string& concept_id) {
  if (pack.find_concept(concept_id) == nullptr) throw TutorError(ErrorCode::UnknownConcept, concept_id);
  std::vector<Question> bank;
  std::copy_if(pack.questions.begin(), pack.questions.end(), std::back_inserter(bank),
               [&](const Question& q) { return q.concept_id == concept_id; });
  std::stable_sort(bank.begin(), bank.end(),
                   [](const Question& a, const Question& b) { return a.question_id < b.question_id; });
  return bank;
}

std::vector<std::string> prerequisite_order(const ContentPack& pack) {
  // Kahn's algorithm with a min-heap on concept_id.
  std::map<std::string, int> indegree;
  std::map<std::string, std::vector<std::string>> dependents;
  for (const auto& c : pack.concepts) {
    indegree.try_emplace(c.concept_id, 0);
    for (const auto& p : c.prerequisites) {
      ++indegree[c.concept_id];
      dependents[p].push_back(c.concept_id);
    }
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push(id);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto id = ready.top();
    ready.pop();
    order.push_back(id);
    for (const auto& d : dependents[id]) {
      if (--indegree[d] == 0) ready.push(d);
    }
  }
  return order;
}

}  // namespace tutor
