#pragma once

#include <map>
#include <string>

namespace tutor {

/// Text keyed by language code. Content authors supply at least the pack's
/// default language; other languages are filled in by translation.
using LocalizedText = std::map<std::string, std::string>;

}  // namespace tutor
