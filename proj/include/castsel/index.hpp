#pragma once

#include "castsel/bits.hpp"
#include "castsel/corpus.hpp"
#include "castsel/fingerprint.hpp"
#include "castsel/tree.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace castsel {

using Position = std::uint32_t;

struct ExemplarRecord {
    std::string id;
    std::string source_lang;
    std::string target_lang;
    std::string source_text;
    std::string target_text;
    TypedTree tree;
    FingerprintProfile profile;
};

struct BuildReport {
    std::vector<std::string> skipped_ids;
    std::vector<std::string> warnings;
};

/// Exemplar corpus with precomputed fingerprint sets and an inverted index
/// from fingerprint to the sorted positions of records containing it.
/// Immutable after construction.
class ExemplarDatabase {
public:
    ExemplarDatabase() = default;
    /// Builds the inverted index from the records' profiles. Throws
    /// InputError on a duplicate id.
    explicit ExemplarDatabase(std::vector<ExemplarRecord> records);

    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }
    const ExemplarRecord& record(Position p) const { return records_.at(p); }
    std::span<const ExemplarRecord> records() const noexcept { return records_; }

    /// Empty span when no record contains `fp`.
    std::span<const Position> postings(Fingerprint fp) const noexcept;
    std::size_t distinct_fingerprints() const noexcept { return inverted_.size(); }
    const std::unordered_map<Fingerprint, std::vector<Position>>& inverted() const noexcept { return inverted_; }

    /// Throws InputError for an unknown id.
    Position position_of(const std::string& id) const;

private:
    std::vector<ExemplarRecord> records_;
    std::unordered_map<Fingerprint, std::vector<Position>> inverted_;
    std::unordered_map<std::string, Position> by_id_;
};

/// Parses and fingerprints every entry. Entries that fail to parse are skipped
/// and listed in `report`; a duplicate id aborts with InputError.
ExemplarDatabase build_database(std::span<const CorpusEntry> corpus, const ParserAdapter& adapter,
                                BuildReport* report = nullptr, unsigned threads = 1);

/// Tree for one corpus entry or query: the stored S-expression when present,
/// otherwise the adapter's parse of the source text.
TypedTree parse_entry_tree(const CorpusEntry& entry, const ParserAdapter& adapter);

/// Binary co-occurrence matrix: one row per candidate, one column per node of
/// the query tree (post-order). M[i][j] = 1 iff the query subtree at column j
/// occurs in candidate i.
class CoMatrix {
public:
    CoMatrix(std::size_t rows, std::size_t columns);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t columns() const noexcept { return columns_; }
    std::size_t words_per_row() const noexcept { return stride_; }

    std::span<const Word> row(std::size_t i) const { return {bits_.data() + i * stride_, stride_}; }
    bool get(std::size_t i, std::size_t j) const { return (bits_[i * stride_ + j / 64] >> (j % 64)) & 1U; }
    void set(std::size_t i, std::size_t j) { bits_[i * stride_ + j / 64] |= Word{1} << (j % 64); }

    /// Database position of each row.
    std::vector<Position> candidate_ids;

    friend bool operator==(const CoMatrix&, const CoMatrix&) = default;

private:
    std::size_t rows_;
    std::size_t columns_;
    std::size_t stride_;
    std::vector<Word> bits_;
};

/// Column-wise construction through the inverted index: each distinct query
/// fingerprint fetches its posting list once. Candidate positions must be
/// distinct and in range (InputError otherwise).
CoMatrix build_cooccurrence(const ExemplarDatabase& db, std::span<const Position> candidates,
                            const FingerprintProfile& query);

// Persistence. Binary layout is documented in docs/index_format.md.
void save_index(const ExemplarDatabase& db, const std::filesystem::path& path);
ExemplarDatabase load_index(const std::filesystem::path& path);
std::string index_to_bytes(const ExemplarDatabase& db);
ExemplarDatabase index_from_bytes(std::string_view bytes);
/// JSON mirror of the binary content, for debugging.
std::string dump_index_json(const ExemplarDatabase& db);

} // namespace castsel
