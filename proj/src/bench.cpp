#include "castsel/bench.hpp"

#include "castsel/baselines.hpp"
#include "castsel/errors.hpp"
#include "castsel/hash.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <thread>

namespace castsel {

namespace {

constexpr std::array<std::pair<std::string_view, Strategy>, 9> kStrategies{{
    {"cast_f", Strategy::CastF},
    {"cast_a", Strategy::CastA},
    {"ld", Strategy::Ld},
    {"random", Strategy::Random},
    {"bm25", Strategy::Bm25},
    {"fixed", Strategy::Fixed},
    {"ast_ed", Strategy::AstEd},
    {"embed", Strategy::Embed},
    {"diversity", Strategy::Diversity},
}};

std::span<const double> query_vector(const StrategyContext& ctx, const CorpusEntry& q) {
    if (!ctx.embeddings || !ctx.query_embeddings) {
        throw InputError("strategies embed and diversity need exemplar and query embeddings");
    }
    auto v = ctx.query_embeddings->find(q.id);
    if (!v) throw InputError("no query embedding for '" + q.id + "'");
    return *v;
}

std::vector<Position> prefix(const std::vector<Position>& order, std::size_t k) {
    return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, order.size()))};
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

Strategy parse_strategy(std::string_view name) {
    for (const auto& [n, s] : kStrategies) {
        if (n == name) return s;
    }
    throw InputError("unknown strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(Strategy s) noexcept {
    for (const auto& [n, v] : kStrategies) {
        if (v == s) return n;
    }
    return "?";
}

std::uint64_t query_seed(std::uint64_t run_seed, std::string_view query_id) noexcept {
    return hash_u64(run_seed + hash_bytes(query_id));
}

PreparedQuery prepare_query(const ExemplarDatabase& db, const CorpusEntry& query, const ParserAdapter& adapter) {
    TypedTree tree = parse_entry_tree(query, adapter);
    FingerprintProfile prof = fingerprint_tree(tree);
    return PreparedQuery{&query, std::move(tree), std::move(prof), rank_by_levenshtein(db, query.source), {}, {}, {}};
}

SelectionResult trace_positions(const ExemplarDatabase& db, std::span<const Position> positions,
                                const FingerprintProfile& query) {
    CoMatrix m = build_cooccurrence(db, positions, query);
    SelectionResult res;
    res.candidates.assign(positions.begin(), positions.end());
    GreedyCover g(m, TieBreak::PrerecallRank);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::size_t gain = marginal_gain(m, g.mask(), r);
        g.take(r);
        res.selected.push_back(positions[r]);
        res.gains.push_back(gain);
        res.cast_after.push_back(g.cast());
    }
    res.coverage_mask = g.mask();
    return res;
}

SelectionResult run_strategy(const StrategyContext& ctx, const PreparedQuery& query, Strategy strategy,
                             std::size_t shots) {
    const ExemplarDatabase& db = ctx.db;
    SelectionConfig cfg;
    cfg.t = ctx.t;
    cfg.tau = ctx.tau;
    cfg.tie_break = ctx.tie_break;
    switch (strategy) {
    case Strategy::CastF:
        cfg.k = shots;
        return select_cast_f(db, query.ld_ranking, query.profile, cfg);
    case Strategy::CastA:
        cfg.k = shots;
        cfg.k_max = shots;
        return select_cast_a(db, query.ld_ranking, query.profile, cfg);
    case Strategy::Ld:
        return trace_positions(db, select_ld(query.ld_ranking, shots), query.profile);
    case Strategy::Random:
        return trace_positions(db, select_random(db, shots, query_seed(ctx.seed, query.entry->id)), query.profile);
    case Strategy::Bm25:
        if (!query.bm25_order) query.bm25_order = select_bm25(db, query.entry->source, db.size());
        return trace_positions(db, prefix(*query.bm25_order, shots), query.profile);
    case Strategy::Fixed: {
        std::vector<std::string> ids;
        if (ctx.fixed_ids.empty()) {
            if (shots > db.size()) throw InputError("fixed strategy: shot exceeds database size");
            for (std::size_t p = 0; p < shots; ++p) ids.push_back(db.record(static_cast<Position>(p)).id);
        } else {
            if (shots > ctx.fixed_ids.size()) throw InputError("fixed strategy: not enough fixed ids for shot");
            ids.assign(ctx.fixed_ids.begin(), ctx.fixed_ids.begin() + static_cast<std::ptrdiff_t>(shots));
        }
        return trace_positions(db, select_fixed(db, ids), query.profile);
    }
    case Strategy::AstEd:
        if (!query.ast_ed_order) query.ast_ed_order = select_ast_ed(db, query.tree, db.size());
        return trace_positions(db, prefix(*query.ast_ed_order, shots), query.profile);
    case Strategy::Embed:
        if (!query.embed_order) {
            query.embed_order = select_embed_topk(db, *ctx.embeddings, query_vector(ctx, *query.entry), db.size());
        }
        return trace_positions(db, prefix(*query.embed_order, shots), query.profile);
    case Strategy::Diversity:
        return trace_positions(db,
                               select_diversity(db, *ctx.embeddings, query_vector(ctx, *query.entry), shots,
                                                query_seed(ctx.seed, query.entry->id)),
                               query.profile);
    }
    throw InvariantError("unhandled strategy");
}

std::vector<CurvePoint> coverage_curve(const StrategyContext& ctx, std::span<const CorpusEntry> queries,
                                       const ParserAdapter& adapter, const CurveOptions& options) {
    if (queries.empty()) throw InputError("no benchmark queries");
    if (options.shots.empty()) throw InputError("no shot counts given");
    for (std::size_t i = 0; i < options.shots.size(); ++i) {
        if (options.shots[i] == 0) throw InputError("shot counts must be positive");
        if (i && options.shots[i] <= options.shots[i - 1]) throw InputError("shot counts must be ascending");
        if (options.shots[i] > ctx.db.size()) {
            throw InputError("shot " + std::to_string(options.shots[i]) + " exceeds corpus size " +
                             std::to_string(ctx.db.size()));
        }
    }
    const std::size_t cells = options.strategies.size() * options.shots.size();
    // results[q][cell] = (cast, selected count)
    std::vector<std::vector<std::pair<double, std::size_t>>> results(queries.size());
    std::vector<std::string> errors(queries.size());

    auto work = [&](std::size_t b, std::size_t e) {
        for (std::size_t q = b; q < e; ++q) {
            try {
                PreparedQuery pq = prepare_query(ctx.db, queries[q], adapter);
                auto& row = results[q];
                row.reserve(cells);
                for (Strategy s : options.strategies) {
                    for (std::size_t shot : options.shots) {
                        SelectionResult r = run_strategy(ctx, pq, s, shot);
                        row.emplace_back(r.cast_after.empty() ? 0.0 : r.cast_after.back(), r.selected.size());
                    }
                }
            } catch (const Error& err) {
                errors[q] = "query '" + queries[q].id + "': " + err.what();
            }
        }
    };
    const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(queries.size())));
    if (threads == 1) {
        work(0, queries.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (queries.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t b = t * chunk, e = std::min(queries.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw InputError(e);
    }

    std::vector<CurvePoint> out;
    std::size_t cell = 0;
    for (Strategy s : options.strategies) {
        for (std::size_t shot : options.shots) {
            double sum = 0, sel = 0;
            for (const auto& row : results) {
                sum += row[cell].first;
                sel += static_cast<double>(row[cell].second);
            }
            const auto nq = static_cast<double>(queries.size());
            out.push_back({s, shot, sum / nq, sel / nq});
            ++cell;
        }
    }
    return out;
}

std::string curve_to_csv(std::span<const CurvePoint> points) {
    std::string out = "strategy,shot,mean_cast,mean_selected\n";
    for (const auto& p : points) {
        out += std::string(strategy_name(p.strategy)) + "," + std::to_string(p.shot) + "," + fmt6(p.mean_cast) + "," +
               fmt6(p.mean_selected) + "\n";
    }
    return out;
}

std::string curve_to_svg(std::span<const CurvePoint> points) {
    constexpr double W = 640, H = 400, L = 60, R = 130, T = 20, B = 50;
    std::size_t max_shot = 1;
    double lo = 1.0, hi = 0.0;
    for (const auto& p : points) {
        max_shot = std::max(max_shot, p.shot);
        lo = std::min(lo, p.mean_cast);
        hi = std::max(hi, p.mean_cast);
    }
    lo = std::max(0.0, lo - 0.05);
    hi = std::min(1.0, hi + 0.05);
    if (hi <= lo) hi = lo + 0.1;
    auto x = [&](double s) { return L + (W - L - R) * s / static_cast<double>(max_shot); };
    auto y = [&](double v) { return H - B - (H - T - B) * (v - lo) / (hi - lo); };

    static constexpr std::array<std::string_view, 9> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                            "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};
    std::map<int, std::vector<const CurvePoint*>> series;
    for (const auto& p : points) series[static_cast<int>(p.strategy)].push_back(&p);

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
                    "font-size=\"12\">\n";
    s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    s += "<line x1=\"" + fmt6(L) + "\" y1=\"" + fmt6(H - B) + "\" x2=\"" + fmt6(W - R) + "\" y2=\"" + fmt6(H - B) +
         "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + fmt6(L) + "\" y1=\"" + fmt6(T) + "\" x2=\"" + fmt6(L) + "\" y2=\"" + fmt6(H - B) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt6((L + W - R) / 2) + "\" y=\"" + fmt6(H - 10) + "\" text-anchor=\"middle\">shots</text>\n";
    s += "<text x=\"15\" y=\"" + fmt6(T + 10) + "\">mean CAST</text>\n";
    for (int i = 0; i <= 4; ++i) {
        double v = lo + (hi - lo) * i / 4.0;
        s += "<text x=\"" + fmt6(L - 5) + "\" y=\"" + fmt6(y(v) + 4) + "\" text-anchor=\"end\">" + fmt6(v).substr(0, 4) +
             "</text>\n";
    }
    std::size_t legend = 0;
    for (const auto& [id, pts] : series) {
        const auto color = colors[static_cast<std::size_t>(id) % colors.size()];
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
        for (const auto* p : pts) s += fmt6(x(static_cast<double>(p->shot))) + "," + fmt6(y(p->mean_cast)) + " ";
        s += "\"/>\n";
        for (const auto* p : pts) {
            s += "<circle cx=\"" + fmt6(x(static_cast<double>(p->shot))) + "\" cy=\"" + fmt6(y(p->mean_cast)) +
                 "\" r=\"3\" fill=\"" + std::string(color) + "\"/>\n";
        }
        s += "<text x=\"" + fmt6(W - R + 10) + "\" y=\"" + fmt6(T + 15 + 18.0 * static_cast<double>(legend++)) +
             "\" fill=\"" + std::string(color) + "\">" + std::string(strategy_name(pts.front()->strategy)) +
             "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace castsel
