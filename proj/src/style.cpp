#include "tutor/style.hpp"

#include <algorithm>

#include "tutor/error.hpp"

namespace tutor {

namespace {
constexpr std::array<std::string_view, 5> kStyleCodes = {"SS", "GOA", "EIA", "CA", "DLA"};
}

std::string_view style_code(LearningStyle style) {
  return kStyleCodes[static_cast<std::size_t>(style)];
}

std::optional<LearningStyle> parse_style(std::string_view code) {
  for (std::size_t i = 0; i < kStyleCodes.size(); ++i) {
    if (kStyleCodes[i] == code) return kAllStyles[i];
  }
  return std::nullopt;
}

LearningStyle next_in_fallback_chain(LearningStyle style) {
  auto it = std::find(kStyleFallbackChain.begin(), kStyleFallbackChain.end(), style);
  ++it;
  return it == kStyleFallbackChain.end() ? kStyleFallbackChain.front() : *it;
}

LearningStyle dominant_style(const std::array<std::int64_t, 5>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return kAllStyles[best];
}

StyleVector make_style_vector(const std::array<std::int64_t, 5>& scores) {
  return StyleVector{scores, dominant_style(scores)};
}

StyleVector score_questionnaire(std::span<const QuestionnaireItem> items,
                                const std::map<std::string, int>& responses) {
  std::array<std::int64_t, 5> scores{};
  for (const auto& item : items) {
    auto it = responses.find(item.item_id);
    if (it == responses.end()) throw TutorError(ErrorCode::MissingResponse, item.item_id);
    const int r = it->second;
    if (r < 1 || r > 5) {
      throw TutorError(ErrorCode::InvalidLikert, item.item_id, std::to_string(r));
    }
    scores[static_cast<std::size_t>(item.scale)] += item.reverse_scored ? 6 - r : r;
  }
  return make_style_vector(scores);
}

}  // namespace tutor
