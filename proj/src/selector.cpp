#include "castsel/selector.hpp"

#include "castsel/errors.hpp"
#include "castsel/levenshtein.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace castsel {

void SelectionConfig::validate() const {
    if (k == 0) throw InputError("k must be positive");
    if (k_max == 0) throw InputError("k_max must be positive");
    if (!(t >= 1.0) || !std::isfinite(t)) throw InputError("pre-recall factor t must be >= 1");
    if (prerecall_size(t, k) < k) throw InputError("floor(t * k) must be >= k");
    if (!(tau > 0.0 && tau <= 1.0)) throw InputError("tau must lie in (0, 1]");
}

std::size_t prerecall_size(double t, std::size_t k) {
    return static_cast<std::size_t>(std::floor(t * static_cast<double>(k) + 1e-9));
}

std::size_t coverage_value(const CoMatrix& m, std::span<const std::size_t> rows) {
    BitVector acc(m.columns());
    for (std::size_t r : rows) {
        if (r >= m.rows()) throw InputError("row index " + std::to_string(r) + " out of range");
        acc |= m.row(r);
    }
    return acc.count();
}

std::size_t marginal_gain(const CoMatrix& m, const BitVector& mask, std::size_t row) {
    if (mask.width() != m.columns()) throw InputError("mask width does not match column count");
    if (row >= m.rows()) throw InputError("row index " + std::to_string(row) + " out of range");
    return count_and_not(m.row(row), mask.words());
}

double cast_ratio(const BitVector& mask, std::size_t column_count) {
    if (column_count == 0) throw InputError("column count must be positive");
    return static_cast<double>(mask.count()) / static_cast<double>(column_count);
}

GreedyCover::GreedyCover(const CoMatrix& m, TieBreak tie_break)
    : m_(m), tie_break_(tie_break), taken_(m.rows(), false), mask_(m.columns()) {}

std::optional<GreedyCover::Pick> GreedyCover::best() const {
    std::optional<Pick> best;
    for (std::size_t r = 0; r < m_.rows(); ++r) {
        if (taken_[r]) continue;
        std::size_t g = count_and_not(m_.row(r), mask_.words());
        if (!best || g > best->gain) {
            best = Pick{r, g};
        } else if (g == best->gain && tie_break_ == TieBreak::LowestPosition &&
                   m_.candidate_ids[r] < m_.candidate_ids[best->row]) {
            best = Pick{r, g};
        }
    }
    return best;
}

std::optional<std::size_t> GreedyCover::next_unselected() const {
    for (std::size_t r = 0; r < m_.rows(); ++r) {
        if (!taken_[r]) return r;
    }
    return std::nullopt;
}

void GreedyCover::take(std::size_t row) {
    if (row >= m_.rows() || taken_[row]) throw InvariantError("greedy picked an invalid row");
    taken_[row] = true;
    mask_ |= m_.row(row);
}

namespace {

void record_pick(SelectionResult& res, const CoMatrix& m, GreedyCover& g, std::size_t row, std::size_t gain) {
    g.take(row);
    res.selected.push_back(m.candidate_ids[row]);
    res.gains.push_back(gain);
    res.cast_after.push_back(g.cast());
}

} // namespace

SelectionResult greedy_select(const CoMatrix& m, std::size_t k, TieBreak tie_break) {
    if (k == 0) throw InputError("k must be positive");
    SelectionResult res;
    res.candidates = m.candidate_ids;
    GreedyCover g(m, tie_break);
    const std::size_t target = std::min(k, m.rows());
    res.shortfall = k - target;
    while (res.selected.size() < target) {
        auto pick = g.best();
        if (!pick) break;
        if (pick->gain == 0) {
            // Saturated: keep |S| = k by pre-recall order.
            while (res.selected.size() < target) {
                auto row = g.next_unselected();
                if (!row) break;
                record_pick(res, m, g, *row, 0);
                ++res.filled_by_fallback;
            }
            break;
        }
        record_pick(res, m, g, pick->row, pick->gain);
    }
    res.coverage_mask = g.mask();
    return res;
}

ExhaustiveResult exhaustive_optimal(const CoMatrix& m, std::size_t k, std::size_t limit) {
    const std::size_t n = m.rows();
    const std::size_t size = std::min(k, n);
    // C(n, size) with early exit once it passes the limit.
    double combos = 1;
    for (std::size_t i = 0; i < size; ++i) {
        combos = combos * static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (combos > static_cast<double>(limit) + 0.5) {
            throw InputError("exhaustive search refused: more than " + std::to_string(limit) + " subsets");
        }
    }

    ExhaustiveResult best;
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    best.witness = idx;
    if (size == 0) return best;
    best.value = coverage_value(m, idx);

    // Lexicographic enumeration of size-combinations; strict improvement keeps
    // the first (smallest) optimal witness.
    std::vector<BitVector> prefix(size + 1, BitVector(m.columns()));
    for (std::size_t j = 0; j < size; ++j) {
        prefix[j + 1] = prefix[j];
        prefix[j + 1] |= m.row(idx[j]);
    }
    for (;;) {
        std::size_t i = size;
        while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
        for (std::size_t j = i - 1; j < size; ++j) {
            prefix[j + 1] = prefix[j];
            prefix[j + 1] |= m.row(idx[j]);
        }
        std::size_t v = prefix[size].count();
        if (v > best.value) {
            best.value = v;
            best.witness = idx;
        }
    }
    return best;
}

std::vector<RankedCandidate> rank_by_levenshtein(const ExemplarDatabase& db, std::string_view query_source,
                                                 unsigned threads) {
    std::vector<RankedCandidate> out(db.size());
    auto work = [&](std::size_t b, std::size_t e) {
        for (std::size_t p = b; p < e; ++p) {
            out[p] = {static_cast<Position>(p), levenshtein(query_source, db.record(static_cast<Position>(p)).source_text)};
        }
    };
    threads = std::max(1U, threads);
    if (threads == 1 || db.size() < 256) {
        work(0, db.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (db.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t b = t * chunk, e = std::min(db.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedCandidate& a, const RankedCandidate& b) { return a.distance < b.distance; });
    return out;
}

std::vector<Position> prerecall_ld(const ExemplarDatabase& db, std::string_view query_source, std::size_t m) {
    if (m == 0) throw InputError("pre-recall size must be positive");
    auto ranking = rank_by_levenshtein(db, query_source);
    std::vector<Position> out;
    const std::size_t take = std::min(m, ranking.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(ranking[i].position);
    return out;
}

namespace {

std::vector<Position> shortlist(std::span<const RankedCandidate> ranking, std::size_t m) {
    std::vector<Position> out;
    const std::size_t take = std::min(m, ranking.size());
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(ranking[i].position);
    return out;
}

void require_nonempty(const ExemplarDatabase& db) {
    if (db.empty()) throw InputError("exemplar database is empty");
}

} // namespace

SelectionResult select_cast_f(const ExemplarDatabase& db, std::span<const RankedCandidate> ranking,
                              const FingerprintProfile& query, const SelectionConfig& cfg) {
    cfg.validate();
    require_nonempty(db);
    auto candidates = shortlist(ranking, prerecall_size(cfg.t, cfg.k));
    CoMatrix m = build_cooccurrence(db, candidates, query);
    return greedy_select(m, cfg.k, cfg.tie_break);
}

SelectionResult select_cast_f(const ExemplarDatabase& db, std::string_view query_source,
                              const TypedTree& query_tree, const SelectionConfig& cfg) {
    cfg.validate();
    require_nonempty(db);
    return select_cast_f(db, rank_by_levenshtein(db, query_source), fingerprint_tree(query_tree), cfg);
}

SelectionResult select_cast_f(const ExemplarDatabase& db, std::string_view query_source,
                              std::string_view query_lang, const SelectionConfig& cfg,
                              const ParserAdapter& adapter) {
    cfg.validate();
    require_nonempty(db);
    return select_cast_f(db, query_source, adapter.parse(query_source, query_lang), cfg);
}

SelectionResult select_cast_a(const ExemplarDatabase& db, std::span<const RankedCandidate> ranking,
                              const FingerprintProfile& query, const SelectionConfig& cfg) {
    cfg.validate();
    require_nonempty(db);
    auto candidates = shortlist(ranking, prerecall_size(cfg.t, cfg.k_max));
    CoMatrix m = build_cooccurrence(db, candidates, query);

    SelectionResult res;
    res.candidates = m.candidate_ids;
    GreedyCover g(m, cfg.tie_break);
    while (res.selected.size() < cfg.k_max) {
        auto pick = g.best();
        if (!pick || pick->gain == 0) break;
        record_pick(res, m, g, pick->row, pick->gain);
        if (res.cast_after.back() >= cfg.tau) {
            res.threshold_reached = true;
            break;
        }
    }
    res.coverage_mask = g.mask();
    return res;
}

SelectionResult select_cast_a(const ExemplarDatabase& db, std::string_view query_source,
                              const TypedTree& query_tree, const SelectionConfig& cfg) {
    cfg.validate();
    require_nonempty(db);
    return select_cast_a(db, rank_by_levenshtein(db, query_source), fingerprint_tree(query_tree), cfg);
}

SelectionResult select_cast_a(const ExemplarDatabase& db, std::string_view query_source,
                              std::string_view query_lang, const SelectionConfig& cfg,
                              const ParserAdapter& adapter) {
    cfg.validate();
    require_nonempty(db);
    return select_cast_a(db, query_source, adapter.parse(query_source, query_lang), cfg);
}

double cast_of_selection(const ExemplarDatabase& db, std::span<const Position> selected,
                         const FingerprintProfile& query) {
    CoMatrix m = build_cooccurrence(db, selected, query);
    BitVector mask(m.columns());
    for (std::size_t r = 0; r < m.rows(); ++r) mask |= m.row(r);
    return cast_ratio(mask, m.columns());
}

} // namespace castsel
