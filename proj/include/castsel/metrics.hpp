#pragma once

#include <string>
#include <string_view>

namespace castsel {

/// Strips trailing spaces, tabs and carriage returns from every line and
/// drops trailing empty lines.
std::string normalize_for_match(std::string_view text);

/// Exact match after normalize_for_match on both sides.
bool exact_match(std::string_view prediction, std::string_view gold);

} // namespace castsel
