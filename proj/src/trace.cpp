#include "castsel/trace.hpp"

#include "castsel/errors.hpp"

#include <json.hpp>

namespace castsel {

std::string_view tie_break_name(TieBreak t) noexcept {
    return t == TieBreak::PrerecallRank ? "prerecall_rank" : "lowest_position";
}

TieBreak parse_tie_break(std::string_view name) {
    if (name == "prerecall_rank") return TieBreak::PrerecallRank;
    if (name == "lowest_position") return TieBreak::LowestPosition;
    throw InputError("unknown tie-break policy '" + std::string(name) + "'");
}

std::string_view prompt_order_name(PromptOrder o) noexcept {
    return o == PromptOrder::Selection ? "selection" : "reversed";
}

PromptOrder parse_prompt_order(std::string_view name) {
    if (name == "selection") return PromptOrder::Selection;
    if (name == "reversed") return PromptOrder::Reversed;
    throw InputError("unknown prompt order '" + std::string(name) + "'");
}

std::string selection_trace_json(const TraceRequest& request, const SelectionResult& result,
                                 const ExemplarDatabase& db, std::optional<double> elapsed_ms) {
    using json = nlohmann::ordered_json;
    json j;
    j["format"] = "castsel-trace-1";
    j["strategy"] = request.strategy;
    json cfg;
    cfg["k"] = request.config.k;
    cfg["t"] = request.config.t;
    cfg["tau"] = request.config.tau;
    cfg["k_max"] = request.config.k_max;
    cfg["tie_break"] = tie_break_name(request.config.tie_break);
    cfg["prompt_order"] = prompt_order_name(request.config.prompt_order);
    cfg["seed"] = request.seed;
    j["config"] = std::move(cfg);
    j["index"] = request.index_path;
    json q;
    q["id"] = request.query_id;
    q["source_lang"] = request.query.source_lang;
    q["target_lang"] = request.query.target_lang;
    q["source"] = request.query.source;
    j["query"] = std::move(q);

    json sel = json::array();
    for (Position p : result.selected) {
        json s;
        s["position"] = p;
        s["id"] = db.record(p).id;
        sel.push_back(std::move(s));
    }
    j["selected"] = std::move(sel);
    j["gains"] = result.gains;
    j["cast_after"] = result.cast_after;
    j["final_cast"] = result.cast_after.empty() ? 0.0 : result.cast_after.back();
    j["filled_by_fallback"] = result.filled_by_fallback;
    j["shortfall"] = result.shortfall;
    j["threshold_reached"] = result.threshold_reached;
    j["columns"] = result.coverage_mask.width();
    j["covered"] = result.coverage_mask.count();
    json cands = json::array();
    for (Position p : result.candidates) cands.push_back(db.record(p).id);
    j["candidates"] = std::move(cands);
    if (elapsed_ms) j["timing_ms"] = *elapsed_ms;
    return j.dump(2) + "\n";
}

ParsedTrace parse_selection_trace(std::string_view json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
        ParsedTrace t;
        t.index_path = j.at("index").get<std::string>();
        for (const auto& s : j.at("selected")) t.selected_ids.push_back(s.at("id").get<std::string>());
        const auto& q = j.at("query");
        t.query.source = q.at("source").get<std::string>();
        t.query.source_lang = q.at("source_lang").get<std::string>();
        t.query.target_lang = q.at("target_lang").get<std::string>();
        t.prompt_order = parse_prompt_order(j.at("config").at("prompt_order").get<std::string>());
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed selection trace: ") + e.what());
    }
}

} // namespace castsel
