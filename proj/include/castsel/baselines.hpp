#pragma once

// Reference exemplar selectors used for head-to-head coverage comparisons.
// Each returns distinct database positions, best first.

#include "castsel/embedding.hpp"
#include "castsel/index.hpp"
#include "castsel/selector.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace castsel {

/// k positions uniformly without replacement (partial Fisher-Yates on
/// mt19937_64). Throws InputError when k > n.
std::vector<Position> select_random(const ExemplarDatabase& db, std::size_t k, std::uint64_t seed);

/// The same positions for every query. Throws InputError on an unknown id.
std::vector<Position> select_fixed(const ExemplarDatabase& db, std::span<const std::string> ids);

/// k smallest Levenshtein distances, ties by position. Throws when k > n.
std::vector<Position> select_ld(const ExemplarDatabase& db, std::string_view query_source, std::size_t k);
/// Same, from a precomputed ranking.
std::vector<Position> select_ld(std::span<const RankedCandidate> ranking, std::size_t k);

/// Maximal runs of [A-Za-z0-9_], lowercased.
std::vector<std::string> bm25_tokenize(std::string_view text);

/// Okapi BM25 over record source texts with
///   idf(t) = ln((n - df + 0.5) / (df + 0.5) + 1).
/// Query terms are summed per occurrence.
class Bm25Index {
public:
    explicit Bm25Index(const ExemplarDatabase& db, double k1 = 1.2, double b = 0.75);

    double idf(const std::string& term) const;
    /// One score per database position. Throws InputError if the query has
    /// no tokens.
    std::vector<double> scores(std::string_view query) const;

private:
    double k1_;
    double b_;
    double avgdl_ = 0;
    std::vector<std::unordered_map<std::string, std::uint32_t>> tf_;
    std::vector<std::size_t> doc_len_;
    std::unordered_map<std::string, std::uint32_t> df_;
};

std::vector<Position> select_bm25(const Bm25Index& index, std::string_view query_source, std::size_t k);
std::vector<Position> select_bm25(const ExemplarDatabase& db, std::string_view query_source, std::size_t k);

/// k smallest tree edit distances between type-only trees, ties by position.
std::vector<Position> select_ast_ed(const ExemplarDatabase& db, const TypedTree& query_tree, std::size_t k);

/// k highest cosine similarities among records that have an embedding; ties
/// by position, zero-norm vectors last. Throws on dimension mismatch.
std::vector<Position> select_embed_topk(const ExemplarDatabase& db, const EmbeddingTable& table,
                                        std::span<const double> query_vec, std::size_t k);

struct KMeansResult {
    std::vector<std::size_t> assignment;
    std::vector<double> centroids;  // k x dim, row-major
    std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Stops after `max_iterations` or
/// when no centroid moves more than `tolerance`.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations = 100, double tolerance = 1e-9);

/// Clusters the embedded records into k groups and takes the member closest
/// (by cosine) to the query from each; empty clusters are backfilled with the
/// next best unselected record overall. Output is ordered by cosine rank.
/// Throws InputError when fewer than k records have embeddings.
std::vector<Position> select_diversity(const ExemplarDatabase& db, const EmbeddingTable& table,
                                       std::span<const double> query_vec, std::size_t k, std::uint64_t seed);

} // namespace castsel
