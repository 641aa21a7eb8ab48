#pragma once

#include <cstddef>
#include <string_view>

namespace castsel {

/// Unit-cost edit distance over raw bytes (case-sensitive, no normalization).
std::size_t levenshtein(std::string_view a, std::string_view b);

} // namespace castsel
