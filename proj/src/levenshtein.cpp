#include "castsel/levenshtein.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace castsel {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    if (b.empty()) return a.size();
    // Single row over the shorter string.
    std::vector<std::uint32_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<std::uint32_t>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::uint32_t diag = row[0];
        row[0] = static_cast<std::uint32_t>(i);
        const char ca = a[i - 1];
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::uint32_t up = row[j];
            std::uint32_t sub = diag + (ca == b[j - 1] ? 0U : 1U);
            row[j] = std::min({up + 1, row[j - 1] + 1, sub});
            diag = up;
        }
    }
    return row[b.size()];
}

} // namespace castsel
