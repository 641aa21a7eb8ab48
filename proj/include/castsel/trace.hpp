#pragma once

#include "castsel/index.hpp"
#include "castsel/prompt.hpp"
#include "castsel/selector.hpp"

#include <optional>
#include <string>
#include <vector>

namespace castsel {

std::string_view tie_break_name(TieBreak t) noexcept;
TieBreak parse_tie_break(std::string_view name);
std::string_view prompt_order_name(PromptOrder o) noexcept;
PromptOrder parse_prompt_order(std::string_view name);

struct TraceRequest {
    std::string strategy;
    SelectionConfig config;
    std::uint64_t seed = 0;
    std::string index_path;
    std::string query_id;
    PromptQuery query;
};

/// Selection trace as pretty-printed JSON. Output is byte-deterministic
/// unless `elapsed_ms` is given.
std::string selection_trace_json(const TraceRequest& request, const SelectionResult& result,
                                 const ExemplarDatabase& db, std::optional<double> elapsed_ms = std::nullopt);

/// What the prompt command needs back from a trace.
struct ParsedTrace {
    std::string index_path;
    std::vector<std::string> selected_ids;
    PromptQuery query;
    PromptOrder prompt_order = PromptOrder::Selection;
};

ParsedTrace parse_selection_trace(std::string_view json_text);

} // namespace castsel
