#include "castsel/prompt.hpp"

#include "castsel/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace castsel {

namespace {

using Bindings = std::vector<std::pair<std::string_view, std::string_view>>;

void render(std::string_view tpl, const Bindings& vars, std::string_view block, std::string& out) {
    for (std::size_t i = 0; i < tpl.size();) {
        char c = tpl[i];
        if (c == '{' && i + 1 < tpl.size() && tpl[i + 1] == '{') {
            out += '{';
            i += 2;
        } else if (c == '}' && i + 1 < tpl.size() && tpl[i + 1] == '}') {
            out += '}';
            i += 2;
        } else if (c == '{') {
            std::size_t close = tpl.find('}', i);
            if (close == std::string_view::npos) {
                throw InputError("unterminated placeholder in " + std::string(block) + " template");
            }
            std::string_view name = tpl.substr(i + 1, close - i - 1);
            bool found = false;
            for (const auto& [k, v] : vars) {
                if (k == name) {
                    out += v;
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw InputError("unknown placeholder {" + std::string(name) + "} in " + std::string(block) +
                                 " template");
            }
            i = close + 1;
        } else {
            out += c;
            ++i;
        }
    }
}

} // namespace

PromptTemplate PromptTemplate::default_template() {
    return PromptTemplate{
        "castsel-default-1",
        "Translate the following {source_lang} code into {target_lang}.\n\n",
        "### Source ({source_lang})\n```\n{source}\n```\n### Target ({target_lang})\n```\n{target}\n```\n\n",
        "### Source ({source_lang})\n```\n{source}\n```\n### Target ({target_lang})\n```\n",
    };
}

PromptTemplate PromptTemplate::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("prompt template: ") + e.what());
    }
    auto field = [&](const char* key) {
        if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
            throw InputError(std::string("prompt template: missing string field '") + key + "'");
        }
        return j[key].get<std::string>();
    };
    return PromptTemplate{field("version"), field("header"), field("exemplar"), field("query")};
}

PromptTemplate PromptTemplate::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open template file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string assemble_prompt(std::span<const Position> selected, const ExemplarDatabase& db, const PromptQuery& query,
                            const PromptTemplate& tpl, PromptOrder order) {
    if (selected.empty()) throw InputError("cannot assemble a prompt from an empty selection");
    std::vector<Position> blocks(selected.begin(), selected.end());
    if (order == PromptOrder::Reversed) std::reverse(blocks.begin(), blocks.end());

    std::string out;
    render(tpl.header, {{"source_lang", query.source_lang}, {"target_lang", query.target_lang}}, "header", out);
    for (Position p : blocks) {
        const ExemplarRecord& r = db.record(p);
        render(tpl.exemplar,
               {{"source_lang", r.source_lang},
                {"target_lang", r.target_lang},
                {"source", r.source_text},
                {"target", r.target_text}},
               "exemplar", out);
    }
    render(tpl.query,
           {{"source_lang", query.source_lang}, {"target_lang", query.target_lang}, {"source", query.source}},
           "query", out);
    return out;
}

} // namespace castsel
