#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "tutor/localized_text.hpp"

namespace tutor {

/// The five Jackson learning styles. Declaration order is the tie-break
/// order used everywhere a single style has to be picked.
enum class LearningStyle : std::uint8_t {
  SensationSeeking,
  GoalOrientedAchiever,
  EmotionallyIntelligentAchiever,
  ConscientiousAchiever,
  DeepLearningAchiever,
};

inline constexpr std::array<LearningStyle, 5> kAllStyles = {
    LearningStyle::SensationSeeking,
    LearningStyle::GoalOrientedAchiever,
    LearningStyle::EmotionallyIntelligentAchiever,
    LearningStyle::ConscientiousAchiever,
    LearningStyle::DeepLearningAchiever,
};

/// Lesson-variant fallback order, most structured style first.
inline constexpr std::array<LearningStyle, 5> kStyleFallbackChain = {
    LearningStyle::DeepLearningAchiever,
    LearningStyle::ConscientiousAchiever,
    LearningStyle::EmotionallyIntelligentAchiever,
    LearningStyle::GoalOrientedAchiever,
    LearningStyle::SensationSeeking,
};

/// Short code: "SS", "GOA", "EIA", "CA", "DLA".
std::string_view style_code(LearningStyle style);
std::optional<LearningStyle> parse_style(std::string_view code);

/// Style following `style` in the fallback chain, wrapping around.
LearningStyle next_in_fallback_chain(LearningStyle style);

struct QuestionnaireItem {
  std::string item_id;
  LocalizedText prompt;
  LearningStyle scale = LearningStyle::SensationSeeking;
  bool reverse_scored = false;

  friend bool operator==(const QuestionnaireItem&, const QuestionnaireItem&) = default;
};

struct StyleVector {
  std::array<std::int64_t, 5> scores{};
  LearningStyle dominant = LearningStyle::SensationSeeking;

  std::int64_t score(LearningStyle style) const {
    return scores[static_cast<std::size_t>(style)];
  }

  friend bool operator==(const StyleVector&, const StyleVector&) = default;
};

/// Argmax over the five scores; the earliest style wins ties.
LearningStyle dominant_style(const std::array<std::int64_t, 5>& scores);
inline LearningStyle dominant_style(const StyleVector& v) { return dominant_style(v.scores); }

StyleVector make_style_vector(const std::array<std::int64_t, 5>& scores);

/// Sums Likert responses (1..5) per scale; reverse-scored items count 6 - r.
/// Throws MissingResponse / InvalidLikert naming the offending item.
StyleVector score_questionnaire(std::span<const QuestionnaireItem> items,
                                const std::map<std::string, int>& responses);

}  // namespace tutor
