#include "castsel/corpus.hpp"

#include "castsel/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <unordered_set>

namespace castsel {

namespace {

std::string required_string(const nlohmann::json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw InputError("corpus line " + std::to_string(line) + ": missing string field '" + key + "'");
    }
    return it->get<std::string>();
}

} // namespace

std::vector<CorpusEntry> read_corpus_jsonl(std::istream& in) {
    std::vector<CorpusEntry> out;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw InputError("corpus line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object()) throw InputError("corpus line " + std::to_string(lineno) + ": expected an object");
        CorpusEntry e;
        e.id = required_string(j, "id", lineno);
        e.source_lang = required_string(j, "source_lang", lineno);
        e.target_lang = required_string(j, "target_lang", lineno);
        e.source = required_string(j, "source", lineno);
        e.target = required_string(j, "target", lineno);
        if (auto it = j.find("source_tree"); it != j.end() && !it->is_null()) {
            if (!it->is_string()) {
                throw InputError("corpus line " + std::to_string(lineno) + ": source_tree must be a string");
            }
            e.source_tree = it->get<std::string>();
        }
        if (!seen.insert(e.id).second) {
            throw InputError("corpus line " + std::to_string(lineno) + ": duplicate id '" + e.id + "'");
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<CorpusEntry> read_corpus_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus file " + path.string());
    return read_corpus_jsonl(in);
}

void write_corpus_jsonl(std::ostream& out, const std::vector<CorpusEntry>& entries) {
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["id"] = e.id;
        j["source_lang"] = e.source_lang;
        j["target_lang"] = e.target_lang;
        j["source"] = e.source;
        j["target"] = e.target;
        if (e.source_tree) j["source_tree"] = *e.source_tree;
        out << j.dump() << '\n';
    }
}

} // namespace castsel
