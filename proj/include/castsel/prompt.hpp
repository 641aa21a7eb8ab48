#pragma once

#include "castsel/index.hpp"
#include "castsel/selector.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace castsel {

/// Prompt layout. Placeholders are substituted verbatim:
///   header:   {source_lang} {target_lang}
///   exemplar: {source_lang} {target_lang} {source} {target}
///   query:    {source_lang} {target_lang} {source}
/// "{{" and "}}" produce literal braces. Anything else in braces is an error.
struct PromptTemplate {
    std::string version;
    std::string header;
    std::string exemplar;
    std::string query;

    static PromptTemplate default_template();
    /// JSON object with string fields version, header, exemplar, query.
    static PromptTemplate from_json(std::string_view text);
    static PromptTemplate read(const std::filesystem::path& path);
};

struct PromptQuery {
    std::string source;
    std::string source_lang;
    std::string target_lang;
};

/// header + one block per selected exemplar (in `order`) + query block.
/// Throws InputError for an empty selection or an unknown placeholder.
std::string assemble_prompt(std::span<const Position> selected, const ExemplarDatabase& db, const PromptQuery& query,
                            const PromptTemplate& tpl, PromptOrder order = PromptOrder::Selection);

} // namespace castsel
