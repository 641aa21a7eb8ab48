#include "castsel/metrics.hpp"

#include <vector>

namespace castsel {

std::string normalize_for_match(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    for (;;) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        std::size_t end = line.find_last_not_of(" \t\r");
        lines.push_back(end == std::string_view::npos ? std::string_view{} : line.substr(0, end + 1));
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

bool exact_match(std::string_view prediction, std::string_view gold) {
    return normalize_for_match(prediction) == normalize_for_match(gold);
}

} // namespace castsel
