#pragma once

#include "castsel/bits.hpp"
#include "castsel/index.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace castsel {

/// How equal marginal gains are resolved. Rows of a co-occurrence matrix
/// are laid out in pre-recall rank order, so PrerecallRank means "first row".
enum class TieBreak { PrerecallRank, LowestPosition };

/// Order of exemplar blocks in an assembled prompt.
enum class PromptOrder { Selection, Reversed };

struct SelectionConfig {
    std::size_t k = 5;
    /// Pre-recall factor: floor(t * k) candidates are shortlisted.
    double t = 2.0;
    /// Adaptive variant only: stop once coverage reaches tau.
    double tau = 0.98;
    std::size_t k_max = 20;
    TieBreak tie_break = TieBreak::PrerecallRank;
    PromptOrder prompt_order = PromptOrder::Selection;

    /// Throws InputError when k or k_max is 0, t < 1, floor(t*k) < k, or
    /// tau is outside (0, 1].
    void validate() const;
};

/// floor(t * k), with a small epsilon so e.g. 1.1 * 10 gives 11.
std::size_t prerecall_size(double t, std::size_t k);

struct SelectionResult {
    /// Database positions in selection order.
    std::vector<Position> selected;
    /// Covered-column count added by each pick.
    std::vector<std::size_t> gains;
    /// Coverage ratio after each pick.
    std::vector<double> cast_after;
    /// Picks made after the best gain dropped to zero.
    std::size_t filled_by_fallback = 0;
    /// Requested slots that could not be filled because the candidate pool
    /// was smaller than k.
    std::size_t shortfall = 0;
    /// Adaptive variant: whether tau was reached. Fixed variant: unused.
    bool threshold_reached = false;
    BitVector coverage_mask;
    /// Pre-recalled candidate positions in rank order (matrix row order).
    std::vector<Position> candidates;
};

/// |OR of rows in S|; 0 for the empty set. Throws InputError on a bad row.
std::size_t coverage_value(const CoMatrix& m, std::span<const std::size_t> rows);

/// popcount(M[row] AND NOT mask). Throws InputError on width mismatch.
std::size_t marginal_gain(const CoMatrix& m, const BitVector& mask, std::size_t row);

/// popcount(mask) / column_count. Throws InputError if column_count is 0.
double cast_ratio(const BitVector& mask, std::size_t column_count);

/// Incremental greedy state over one matrix.
class GreedyCover {
public:
    GreedyCover(const CoMatrix& m, TieBreak tie_break);

    struct Pick {
        std::size_t row;
        std::size_t gain;
    };

    /// Unselected row with maximal marginal gain; nullopt once every row is taken.
    std::optional<Pick> best() const;
    /// Lowest unselected row; nullopt once every row is taken.
    std::optional<std::size_t> next_unselected() const;
    void take(std::size_t row);

    const BitVector& mask() const noexcept { return mask_; }
    double cast() const { return cast_ratio(mask_, m_.columns()); }

private:
    const CoMatrix& m_;
    TieBreak tie_break_;
    std::vector<bool> taken_;
    BitVector mask_;
};

/// Greedy maximization of the coverage function. When the best gain hits 0
/// before k picks, remaining slots are filled in row order. Positions in the
/// result are M.candidate_ids of the picked rows.
SelectionResult greedy_select(const CoMatrix& m, std::size_t k, TieBreak tie_break = TieBreak::PrerecallRank);

struct ExhaustiveResult {
    std::size_t value = 0;
    std::vector<std::size_t> witness;
};

/// True optimum over subsets of size min(k, rows), by enumeration. The witness
/// is the lexicographically smallest optimal subset. Refuses (InputError) when
/// more than `limit` subsets would be enumerated.
ExhaustiveResult exhaustive_optimal(const CoMatrix& m, std::size_t k, std::size_t limit = 1'000'000);

struct RankedCandidate {
    Position position;
    std::size_t distance;
};

/// Every database position by ascending Levenshtein distance of source text,
/// ties by ascending position.
std::vector<RankedCandidate> rank_by_levenshtein(const ExemplarDatabase& db, std::string_view query_source,
                                                 unsigned threads = 1);

/// The m nearest positions (all of them when m > n). Throws InputError if m == 0.
std::vector<Position> prerecall_ld(const ExemplarDatabase& db, std::string_view query_source, std::size_t m);

/// Fixed-size selection: pre-recall floor(t*k) by Levenshtein, build the
/// co-occurrence matrix, greedily pick k.
SelectionResult select_cast_f(const ExemplarDatabase& db, std::string_view query_source,
                              std::string_view query_lang, const SelectionConfig& cfg,
                              const ParserAdapter& adapter);
SelectionResult select_cast_f(const ExemplarDatabase& db, std::string_view query_source,
                              const TypedTree& query_tree, const SelectionConfig& cfg);
/// Same pipeline with a precomputed full Levenshtein ranking.
SelectionResult select_cast_f(const ExemplarDatabase& db, std::span<const RankedCandidate> ranking,
                              const FingerprintProfile& query, const SelectionConfig& cfg);

/// Adaptive selection: pre-recall floor(t*k_max), then greedy until coverage
/// reaches tau (checked after each pick), the best gain is 0, or k_max picks.
/// No fallback fill.
SelectionResult select_cast_a(const ExemplarDatabase& db, std::string_view query_source,
                              std::string_view query_lang, const SelectionConfig& cfg,
                              const ParserAdapter& adapter);
SelectionResult select_cast_a(const ExemplarDatabase& db, std::string_view query_source,
                              const TypedTree& query_tree, const SelectionConfig& cfg);
SelectionResult select_cast_a(const ExemplarDatabase& db, std::span<const RankedCandidate> ranking,
                              const FingerprintProfile& query, const SelectionConfig& cfg);

/// Coverage ratio of an arbitrary set of database positions for one query.
double cast_of_selection(const ExemplarDatabase& db, std::span<const Position> selected,
                         const FingerprintProfile& query);

} // namespace castsel
