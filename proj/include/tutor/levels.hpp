#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace tutor {

/// Knowledge bands, also used as question difficulty levels.
enum class KnowledgeLevel : std::uint8_t { Weak, Average, Good, VeryGood, Excellent };
using DifficultyLevel = KnowledgeLevel;

inline constexpr std::array<KnowledgeLevel, 5> kAllLevels = {
    KnowledgeLevel::Weak, KnowledgeLevel::Average, KnowledgeLevel::Good,
    KnowledgeLevel::VeryGood, KnowledgeLevel::Excellent};

struct LevelBand {
  int low;
  int high;
  KnowledgeLevel level;
};

/// Score bands, inclusive on both ends, covering 0..100 exactly once.
inline constexpr std::array<LevelBand, 5> kLevelBands = {{
    {86, 100, KnowledgeLevel::Excellent},
    {71, 85, KnowledgeLevel::VeryGood},
    {51, 70, KnowledgeLevel::Good},
    {31, 50, KnowledgeLevel::Average},
    {0, 30, KnowledgeLevel::Weak},
}};

/// Throws OutOfRange outside [0, 100].
KnowledgeLevel classify_level(int score);

std::string_view level_name(KnowledgeLevel level);
std::optional<KnowledgeLevel> parse_level(std::string_view name);

/// Level shifted by `delta` bands, clamped to the scale ends.
KnowledgeLevel shift_level(KnowledgeLevel level, int delta);

}  // namespace tutor
