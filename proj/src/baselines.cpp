#include "castsel/baselines.hpp"

#include "castsel/errors.hpp"
#include "castsel/random.hpp"
#include "castsel/tree_edit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace castsel {

namespace {

void require_k(std::size_t k) {
    if (k == 0) throw InputError("k must be positive");
}

template <class Key>
std::vector<Position> top_by(std::size_t n, std::size_t k, Key key) {
    std::vector<Position> order(n);
    std::iota(order.begin(), order.end(), Position{0});
    std::stable_sort(order.begin(), order.end(), [&](Position a, Position b) { return key(a) < key(b); });
    order.resize(std::min(k, n));
    return order;
}

} // namespace

std::vector<Position> select_random(const ExemplarDatabase& db, std::size_t k, std::uint64_t seed) {
    require_k(k);
    const std::size_t n = db.size();
    if (k > n) throw InputError("cannot draw " + std::to_string(k) + " of " + std::to_string(n) + " exemplars");
    std::vector<Position> pool(n);
    std::iota(pool.begin(), pool.end(), Position{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

std::vector<Position> select_fixed(const ExemplarDatabase& db, std::span<const std::string> ids) {
    std::vector<Position> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        Position p = db.position_of(id);
        if (std::find(out.begin(), out.end(), p) != out.end()) throw InputError("fixed id '" + id + "' listed twice");
        out.push_back(p);
    }
    return out;
}

std::vector<Position> select_ld(std::span<const RankedCandidate> ranking, std::size_t k) {
    require_k(k);
    if (k > ranking.size()) {
        throw InputError("k = " + std::to_string(k) + " exceeds database size " + std::to_string(ranking.size()));
    }
    std::vector<Position> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(ranking[i].position);
    return out;
}

std::vector<Position> select_ld(const ExemplarDatabase& db, std::string_view query_source, std::size_t k) {
    require_k(k);
    return select_ld(rank_by_levenshtein(db, query_source), k);
}

std::vector<std::string> bm25_tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || c == '_') {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

Bm25Index::Bm25Index(const ExemplarDatabase& db, double k1, double b) : k1_(k1), b_(b) {
    tf_.resize(db.size());
    doc_len_.resize(db.size());
    std::size_t total = 0;
    for (std::size_t p = 0; p < db.size(); ++p) {
        auto toks = bm25_tokenize(db.record(static_cast<Position>(p)).source_text);
        doc_len_[p] = toks.size();
        total += toks.size();
        for (auto& t : toks) ++tf_[p][t];
        for (const auto& [t, _] : tf_[p]) ++df_[t];
    }
    avgdl_ = db.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(db.size());
}

double Bm25Index::idf(const std::string& term) const {
    const double n = static_cast<double>(tf_.size());
    auto it = df_.find(term);
    const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

std::vector<double> Bm25Index::scores(std::string_view query) const {
    auto q = bm25_tokenize(query);
    if (q.empty()) throw InputError("BM25 query has no tokens");
    std::vector<double> idfs;
    idfs.reserve(q.size());
    for (const auto& t : q) idfs.push_back(idf(t));
    std::vector<double> out(tf_.size(), 0.0);
    for (std::size_t p = 0; p < tf_.size(); ++p) {
        const double norm = avgdl_ > 0 ? static_cast<double>(doc_len_[p]) / avgdl_ : 0.0;
        double s = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            auto it = tf_[p].find(q[i]);
            if (it == tf_[p].end()) continue;
            const double f = it->second;
            s += idfs[i] * f * (k1_ + 1) / (f + k1_ * (1 - b_ + b_ * norm));
        }
        out[p] = s;
    }
    return out;
}

std::vector<Position> select_bm25(const Bm25Index& index, std::string_view query_source, std::size_t k) {
    require_k(k);
    auto s = index.scores(query_source);
    return top_by(s.size(), k, [&](Position p) { return -s[p]; });
}

std::vector<Position> select_bm25(const ExemplarDatabase& db, std::string_view query_source, std::size_t k) {
    return select_bm25(Bm25Index(db), query_source, k);
}

std::vector<Position> select_ast_ed(const ExemplarDatabase& db, const TypedTree& query_tree, std::size_t k) {
    require_k(k);
    std::vector<std::size_t> d(db.size());
    for (std::size_t p = 0; p < db.size(); ++p) d[p] = tree_edit_distance(query_tree, db.record(static_cast<Position>(p)).tree);
    return top_by(db.size(), k, [&](Position p) { return d[p]; });
}

namespace {

struct Scored {
    Position position;
    std::optional<double> cos;
};

// Embedded records ranked by descending cosine, ties by position, zero
// norms last.
std::vector<Scored> cosine_ranking(const ExemplarDatabase& db, const EmbeddingTable& table,
                                   std::span<const double> query_vec) {
    if (query_vec.size() != table.dim()) {
        throw InputError("query embedding has dimension " + std::to_string(query_vec.size()) + ", expected " +
                         std::to_string(table.dim()));
    }
    std::vector<Scored> out;
    for (std::size_t p = 0; p < db.size(); ++p) {
        auto v = table.find(db.record(static_cast<Position>(p)).id);
        if (v) out.push_back({static_cast<Position>(p), cosine(*v, query_vec)});
    }
    std::stable_sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
        if (a.cos.has_value() != b.cos.has_value()) return a.cos.has_value();
        return a.cos && *a.cos > *b.cos;
    });
    return out;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

} // namespace

std::vector<Position> select_embed_topk(const ExemplarDatabase& db, const EmbeddingTable& table,
                                        std::span<const double> query_vec, std::size_t k) {
    require_k(k);
    auto ranked = cosine_ranking(db, table, query_vec);
    std::vector<Position> out;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) out.push_back(ranked[i].position);
    return out;
}

KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k, std::uint64_t seed,
                    std::size_t max_iterations, double tolerance) {
    if (dim == 0 || points.size() % dim != 0) throw InputError("point buffer is not a multiple of the dimension");
    const std::size_t n = points.size() / dim;
    require_k(k);
    if (n < k) throw InputError("cannot form " + std::to_string(k) + " clusters from " + std::to_string(n) + " points");
    auto pt = [&](std::size_t i) { return points.subspan(i * dim, dim); };

    KMeansResult res;
    res.centroids.resize(k * dim);
    auto centroid = [&](std::size_t c) { return std::span<double>(res.centroids).subspan(c * dim, dim); };

    // k-means++ seeding.
    std::mt19937_64 rng(seed);
    std::vector<bool> chosen(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t first = static_cast<std::size_t>(uniform_below(rng, n));
    chosen[first] = true;
    std::copy_n(pt(first).begin(), dim, centroid(0).begin());
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(pt(i), centroid(c - 1)));
            if (!chosen[i]) total += d2[i];
        }
        std::size_t pick = n;
        if (total > 0) {
            double u = uniform_unit(rng) * total;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i]) continue;
                pick = i;
                if (u < d2[i]) break;
                u -= d2[i];
            }
        } else {
            // Every remaining point coincides with a centroid.
            std::size_t r = static_cast<std::size_t>(uniform_below(rng, n - c));
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i] && r-- == 0) {
                    pick = i;
                    break;
                }
            }
        }
        chosen[pick] = true;
        std::copy_n(pt(pick).begin(), dim, centroid(c).begin());
    }

    res.assignment.assign(n, 0);
    std::vector<double> next(k * dim);
    std::vector<std::size_t> counts(k);
    for (res.iterations = 0; res.iterations < max_iterations;) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double bd = sq_dist(pt(i), centroid(0));
            for (std::size_t c = 1; c < k; ++c) {
                double d = sq_dist(pt(i), centroid(c));
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            res.assignment[i] = best;
        }
        ++res.iterations;
        std::fill(next.begin(), next.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t c = res.assignment[i];
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) next[c * dim + d] += pt(i)[d];
        }
        double shift = 0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            std::span<double> cur = centroid(c);
            for (std::size_t d = 0; d < dim; ++d) {
                double v = next[c * dim + d] / static_cast<double>(counts[c]);
                shift = std::max(shift, std::abs(v - cur[d]));
                cur[d] = v;
            }
        }
        if (shift < tolerance) break;
    }
    return res;
}

std::vector<Position> select_diversity(const ExemplarDatabase& db, const EmbeddingTable& table,
                                       std::span<const double> query_vec, std::size_t k, std::uint64_t seed) {
    require_k(k);
    auto ranked = cosine_ranking(db, table, query_vec);
    const std::size_t n = ranked.size();
    if (n < k) throw InputError("diversity selection needs at least k embedded exemplars");

    // Cluster in database-position order so results do not depend on the query.
    std::vector<Position> members;
    members.reserve(n);
    for (const auto& s : ranked) members.push_back(s.position);
    std::sort(members.begin(), members.end());
    std::vector<double> pts;
    pts.reserve(n * table.dim());
    for (Position p : members) {
        auto v = *table.find(db.record(p).id);
        pts.insert(pts.end(), v.begin(), v.end());
    }
    const KMeansResult km = kmeans(pts, table.dim(), k, seed);

    std::vector<std::size_t> rank_of(db.size(), 0);
    for (std::size_t r = 0; r < n; ++r) rank_of[ranked[r].position] = r;

    // Best-ranked member of each cluster.
    std::vector<std::size_t> cluster_best(k, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = km.assignment[i];
        cluster_best[c] = std::min(cluster_best[c], rank_of[members[i]]);
    }
    std::vector<bool> picked(n, false);
    for (std::size_t r : cluster_best) {
        if (r < n) picked[r] = true;
    }
    std::size_t have = static_cast<std::size_t>(std::count(picked.begin(), picked.end(), true));
    for (std::size_t r = 0; r < n && have < k; ++r) {
        if (!picked[r]) {
            picked[r] = true;
            ++have;
        }
    }
    std::vector<Position> out;
    for (std::size_t r = 0; r < n; ++r) {
        if (picked[r]) out.push_back(ranked[r].position);
    }
    return out;
}

} // namespace castsel
