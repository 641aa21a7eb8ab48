#include "castsel/index.hpp"

#include "castsel/errors.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <thread>

namespace castsel {

ExemplarDatabase::ExemplarDatabase(std::vector<ExemplarRecord> records) : records_(std::move(records)) {
    for (std::size_t p = 0; p < records_.size(); ++p) {
        const auto pos = static_cast<Position>(p);
        if (!by_id_.emplace(records_[p].id, pos).second) {
            throw InputError("duplicate exemplar id '" + records_[p].id + "'");
        }
        // Positions are visited in increasing order, so posting lists come
        // out sorted.
        for (Fingerprint fp : records_[p].profile.set) inverted_[fp].push_back(pos);
    }
}

std::span<const Position> ExemplarDatabase::postings(Fingerprint fp) const noexcept {
    auto it = inverted_.find(fp);
    if (it == inverted_.end()) return {};
    return it->second;
}

Position ExemplarDatabase::position_of(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw InputError("unknown exemplar id '" + id + "'");
    return it->second;
}

TypedTree parse_entry_tree(const CorpusEntry& entry, const ParserAdapter& adapter) {
    if (entry.source_tree) return parse_sexpr(*entry.source_tree);
    return adapter.parse(entry.source, entry.source_lang);
}

ExemplarDatabase build_database(std::span<const CorpusEntry> corpus, const ParserAdapter& adapter,
                                BuildReport* report, unsigned threads) {
    {
        std::unordered_map<std::string_view, std::size_t> ids;
        for (const auto& e : corpus) {
            if (!ids.emplace(e.id, 0).second) throw InputError("duplicate exemplar id '" + e.id + "'");
        }
    }

    struct Slot {
        std::optional<ExemplarRecord> record;
        std::string error;
    };
    std::vector<Slot> slots(corpus.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const CorpusEntry& e = corpus[i];
            try {
                TypedTree tree = parse_entry_tree(e, adapter);
                FingerprintProfile prof = fingerprint_tree(tree);
                slots[i].record.emplace(ExemplarRecord{e.id, e.source_lang, e.target_lang, e.source, e.target,
                                                       std::move(tree), std::move(prof)});
            } catch (const InputError& err) {
                slots[i].error = err.what();
            }
        }
    };

    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(corpus.size() / 64 + 1)));
    if (threads == 1) {
        work(0, corpus.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (corpus.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t b = t * chunk;
            std::size_t e = std::min(corpus.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<ExemplarRecord> records;
    records.reserve(corpus.size());
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].record) {
            records.push_back(std::move(*slots[i].record));
        } else if (report) {
            report->skipped_ids.push_back(corpus[i].id);
            report->warnings.push_back("skipped '" + corpus[i].id + "': " + slots[i].error);
        }
    }
    return ExemplarDatabase(std::move(records));
}

CoMatrix::CoMatrix(std::size_t rows, std::size_t columns)
    : candidate_ids(rows), rows_(rows), columns_(columns), stride_(words_for(columns)), bits_(rows * stride_, 0) {
    std::iota(candidate_ids.begin(), candidate_ids.end(), Position{0});
}

CoMatrix build_cooccurrence(const ExemplarDatabase& db, std::span<const Position> candidates,
                            const FingerprintProfile& query) {
    if (query.per_node.empty()) throw InputError("query profile is empty");
    const std::size_t n = db.size();
    std::vector<std::int32_t> row_of(n, -1);
    for (std::size_t r = 0; r < candidates.size(); ++r) {
        Position p = candidates[r];
        if (p >= n) {
            throw InputError("candidate position " + std::to_string(p) + " out of range (database has " +
                             std::to_string(n) + " records)");
        }
        if (row_of[p] >= 0) throw InputError("candidate position " + std::to_string(p) + " listed twice");
        row_of[p] = static_cast<std::int32_t>(r);
    }

    CoMatrix m(candidates.size(), query.per_node.size());
    m.candidate_ids.assign(candidates.begin(), candidates.end());
    if (candidates.empty()) return m;

    // Group columns by fingerprint so each posting list is read once.
    std::vector<std::pair<Fingerprint, std::uint32_t>> cols;
    cols.reserve(query.per_node.size());
    for (std::size_t j = 0; j < query.per_node.size(); ++j) {
        cols.emplace_back(query.per_node[j], static_cast<std::uint32_t>(j));
    }
    std::sort(cols.begin(), cols.end());
    for (std::size_t a = 0; a < cols.size();) {
        std::size_t b = a;
        while (b < cols.size() && cols[b].first == cols[a].first) ++b;
        for (Position p : db.postings(cols[a].first)) {
            if (std::int32_t r = row_of[p]; r >= 0) {
                for (std::size_t c = a; c < b; ++c) m.set(static_cast<std::size_t>(r), cols[c].second);
            }
        }
        a = b;
    }
    return m;
}

} // namespace castsel
