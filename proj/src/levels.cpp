#include "tutor/levels.hpp"

#include <algorithm>
#include <string>

#include "tutor/error.hpp"

namespace tutor {

namespace {
constexpr std::array<std::string_view, 5> kLevelNames = {"Weak", "Average", "Good", "VeryGood",
                                                         "Excellent"};
}

KnowledgeLevel classify_level(int score) {
  if (score < 0 || score > 100) throw TutorError(ErrorCode::OutOfRange, std::to_string(score));
  if (score >= 86) return KnowledgeLevel::Excellent;
  if (score >= 71) return KnowledgeLevel::VeryGood;
  if (score >= 51) return KnowledgeLevel::Good;
  if (score >= 31) return KnowledgeLevel::Average;
  return KnowledgeLevel::Weak;
}

std::string_view level_name(KnowledgeLevel level) {
  return kLevelNames[static_cast<std::size_t>(level)];
}

std::optional<KnowledgeLevel> parse_level(std::string_view name) {
  for (std::size_t i = 0; i < kLevelNames.size(); ++i) {
    if (kLevelNames[i] == name) return kAllLevels[i];
  }
  return std::nullopt;
}

KnowledgeLevel shift_level(KnowledgeLevel level, int delta) {
  const int shifted = std::clamp(static_cast<int>(level) + delta, 0, 4);
  return static_cast<KnowledgeLevel>(shifted);
}

}  // namespace tutor
