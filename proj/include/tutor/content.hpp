#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tutor/error.hpp"
#include "tutor/levels.hpp"
#include "tutor/localized_text.hpp"
#include "tutor/style.hpp"

namespace tutor {

struct Concept {
  std::string concept_id;
  LocalizedText title;
  std::vector<std::string> sections;
  std::vector<std::string> prerequisites;

  bool has_section(const std::string& section_id) const;

  friend bool operator==(const Concept&, const Concept&) = default;
};

struct ContentBlock {
  std::string language;
  std::string text;

  friend bool operator==(const ContentBlock&, const ContentBlock&) = default;
};

struct LessonVariant {
  std::string concept_id;
  LearningStyle style = LearningStyle::SensationSeeking;
  std::vector<ContentBlock> body;

  friend bool operator==(const LessonVariant&, const LessonVariant&) = default;
};

enum class EvalKind : std::uint8_t { Conceptual, Objective };

std::string_view eval_kind_name(EvalKind kind);
std::optional<EvalKind> parse_eval_kind(std::string_view name);

struct Question {
  std::string question_id;
  std::string concept_id;
  std::string section_id;
  DifficultyLevel level = DifficultyLevel::Good;
  int score_weight = 1;
  EvalKind eval_kind = EvalKind::Conceptual;
  LocalizedText stem;
  std::vector<LocalizedText> choices;
  int correct_index = 0;

  friend bool operator==(const Question&, const Question&) = default;
};

/// Immutable once loaded. Every collection is sorted by id.
struct ContentPack {
  std::string pack_id;
  std::string version;
  std::string default_language;
  std::vector<Concept> concepts;
  std::vector<LessonVariant> lessons;  // sorted by (concept_id, style)
  std::vector<Question> questions;     // sorted by question_id
  std::vector<QuestionnaireItem> questionnaire;

  const Concept* find_concept(const std::string& concept_id) const;
  const Question* find_question(const std::string& question_id) const;

  friend bool operator==(const ContentPack&, const ContentPack&) = default;
};

struct PackDiagnostic {
  ErrorCode code;
  std::string subject;
  std::string detail;
};

struct PackLoadReport {
  std::optional<ContentPack> pack;  // set only when diagnostics is empty
  std::vector<PackDiagnostic> diagnostics;
};

/// Parses and validates a pack directory, collecting every problem found.
PackLoadReport load_pack_checked(const std::filesystem::path& root);

/// Same as load_pack_checked but throws the first diagnostic as a TutorError.
ContentPack load_pack(const std::filesystem::path& root);

/// Validates an in-memory pack (used by the loader and by generators).
std::vector<PackDiagnostic> validate_pack(const ContentPack& pack);

/// Sorts every collection into canonical order.
void canonicalize(ContentPack& pack);

/// Writes the pack in the directory format that load_pack reads.
void write_pack(const ContentPack& pack, const std::filesystem::path& root);

/// Exact-style variant, else the first present along the fallback chain.
const LessonVariant& variant_for(const ContentPack& pack, const std::string& concept_id,
                                 LearningStyle style);

bool has_variant(const ContentPack& pack, const std::string& concept_id, LearningStyle style);

/// All questions of a concept sorted by question_id.
std::vector<Question> bank_for(const ContentPack& pack, const std::string& concept_id);

/// Concept ids in prerequisite order; ties broken by concept_id.
std::vector<std::string> prerequisite_order(const ContentPack& pack);

}  // namespace tutor
