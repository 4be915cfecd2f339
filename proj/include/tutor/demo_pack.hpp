#pragma once

#include "tutor/content.hpp"

namespace tutor {

/// A small arithmetic course: three chained concepts with three sections
/// each, fifteen questions per concept spread over all five levels and both
/// evaluation kinds, lesson variants for several styles, and a ten-item
/// questionnaire (two items per scale). English content with some Persian.
ContentPack demo_pack();

/// Tab-separated glossary covering the demo pack's vocabulary (en->fa, en->es).
std::string demo_glossary();

}  // namespace tutor
