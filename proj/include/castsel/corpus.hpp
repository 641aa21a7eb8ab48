#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace castsel {

/// One line of a corpus JSONL file.
struct CorpusEntry {
    std::string id;
    std::string source_lang;
    std::string target_lang;
    std::string source;
    std::string target;
    /// Pre-parsed source tree. When present it replaces the parser adapter.
    std::optional<std::string> source_tree;
};

/// Fields: id, source_lang, target_lang, source, target, optional source_tree.
/// Blank lines are ignored. Throws InputError naming the line on bad input
/// or a repeated id.
std::vector<CorpusEntry> read_corpus_jsonl(std::istream& in);
std::vector<CorpusEntry> read_corpus_jsonl(const std::filesystem::path& path);

void write_corpus_jsonl(std::ostream& out, const std::vector<CorpusEntry>& entries);

} // namespace castsel
