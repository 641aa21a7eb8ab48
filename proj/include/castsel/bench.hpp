#pragma once

#include "castsel/corpus.hpp"
#include "castsel/embedding.hpp"
#include "castsel/index.hpp"
#include "castsel/selector.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace castsel {

enum class Strategy { CastF, CastA, Ld, Random, Bm25, Fixed, AstEd, Embed, Diversity };

/// Names: cast_f cast_a ld random bm25 fixed ast_ed embed diversity.
Strategy parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s) noexcept;

/// Per-query seed derived from the run seed and the query id.
std::uint64_t query_seed(std::uint64_t run_seed, std::string_view query_id) noexcept;

/// Everything needed to run any strategy for one query.
struct StrategyContext {
    const ExemplarDatabase& db;
    double t = 2.0;
    double tau = 0.98;
    TieBreak tie_break = TieBreak::PrerecallRank;
    std::uint64_t seed = 0;
    /// Fixed strategy: first `shot` of these ids; database order when empty.
    std::vector<std::string> fixed_ids;
    const EmbeddingTable* embeddings = nullptr;
    const EmbeddingTable* query_embeddings = nullptr;
};

/// Parsed query plus full rankings cached across shot counts. Top-k of every
/// ranking-based baseline is a prefix of its full ranking.
struct PreparedQuery {
    const CorpusEntry* entry;
    TypedTree tree;
    FingerprintProfile profile;
    std::vector<RankedCandidate> ld_ranking;
    mutable std::optional<std::vector<Position>> bm25_order;
    mutable std::optional<std::vector<Position>> ast_ed_order;
    mutable std::optional<std::vector<Position>> embed_order;
};

PreparedQuery prepare_query(const ExemplarDatabase& db, const CorpusEntry& query, const ParserAdapter& adapter);

/// Runs one strategy with `shots` as k (k_max for cast_a). Returns the
/// selection with gains and coverage filled in for every strategy.
SelectionResult run_strategy(const StrategyContext& ctx, const PreparedQuery& query, Strategy strategy,
                             std::size_t shots);

/// Gains and running coverage for positions taken in the given order.
SelectionResult trace_positions(const ExemplarDatabase& db, std::span<const Position> positions,
                                const FingerprintProfile& query);

struct CurvePoint {
    Strategy strategy;
    std::size_t shot;
    double mean_cast;
    double mean_selected;
};

struct CurveOptions {
    std::vector<Strategy> strategies;
    std::vector<std::size_t> shots;
    unsigned threads = 1;
};

/// Mean coverage ratio over queries for every (strategy, shot). Shots must be
/// ascending and no larger than the database (InputError otherwise).
std::vector<CurvePoint> coverage_curve(const StrategyContext& ctx, std::span<const CorpusEntry> queries,
                                       const ParserAdapter& adapter, const CurveOptions& options);

/// "strategy,shot,mean_cast,mean_selected" with six decimals.
std::string curve_to_csv(std::span<const CurvePoint> points);

/// Line plot of mean coverage against shots, one polyline per strategy.
std::string curve_to_svg(std::span<const CurvePoint> points);

} // namespace castsel
