#include <doctest.h>

#include "castsel/corpus_gen.hpp"
#include "castsel/errors.hpp"
#include "castsel/levenshtein.hpp"
#include "castsel/minilang.hpp"
#include "castsel/selector.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numeric>

using namespace castsel;

namespace {

CoMatrix matrix(const std::vector<std::string>& rows) {
    CoMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            if (rows[i][j] == '1') m.set(i, j);
    return m;
}

BitVector bits(const std::string& s) {
    BitVector b(s.size());
    for (std::size_t j = 0; j < s.size(); ++j)
        if (s[j] == '1') b.set(j);
    return b;
}

ExemplarDatabase sexpr_db(const std::vector<std::pair<std::string, std::string>>& src_and_tree) {
    std::vector<CorpusEntry> c;
    for (std::size_t i = 0; i < src_and_tree.size(); ++i)
        c.push_back({"e" + std::to_string(i), "x", "y", src_and_tree[i].first, "", src_and_tree[i].second});
    return build_database(c, SexprAdapter{});
}

} // namespace

TEST_CASE("coverage_value examples") {
    auto m = matrix({"110", "011"});
    CHECK(coverage_value(m, std::vector<std::size_t>{}) == 0);
    CHECK(coverage_value(m, std::vector<std::size_t>{0, 1}) == 3);
    CHECK_THROWS_AS(coverage_value(m, std::vector<std::size_t>{2}), InputError);
}

TEST_CASE("coverage_value equals the column scan") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 200; ++t) {
        std::size_t rows = 1 + uniform_below(rng, 10), cols = 1 + uniform_below(rng, 12);
        auto b = oracle::random_bool_matrix(rng, rows, cols, 0.3);
        auto m = oracle::to_comatrix(b, cols);
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < rows; ++i)
            if (uniform_below(rng, 2)) s.push_back(i);
        CHECK(coverage_value(m, s) == oracle::coverage_naive(b, s, cols));
    }
}

TEST_CASE("marginal_gain examples") {
    auto m = matrix({"101", "111"});
    CHECK(marginal_gain(m, bits("000"), 0) == 2);
    CHECK(marginal_gain(m, bits("111"), 0) == 0);
    CHECK(marginal_gain(m, bits("111"), 1) == 0);
    CHECK(marginal_gain(m, bits("100"), 1) == 2);
    CHECK_THROWS_AS(marginal_gain(m, bits("0000"), 0), InputError);
}

TEST_CASE("marginal gain agrees with the other two identities") {
    std::mt19937_64 rng(37);
    for (int t = 0; t < 300; ++t) {
        std::size_t w = 1 + uniform_below(rng, 512);
        BitVector a(w), b(w);
        for (std::size_t j = 0; j < w; ++j) {
            if (uniform_unit(rng) < 0.4) a.set(j);
            if (uniform_unit(rng) < 0.4) b.set(j);
        }
        std::size_t or_count = 0, and_count = 0;
        for (std::size_t j = 0; j < w; ++j) {
            or_count += a.test(j) || b.test(j);
            and_count += a.test(j) && b.test(j);
        }
        std::size_t lhs = count_and_not(b.words(), a.words());
        CHECK(lhs == or_count - a.count());
        CHECK(lhs == b.count() - and_count);
    }
}

TEST_CASE("greedy_select worked example") {
    auto m = matrix({"1100", "0011", "1110"});
    auto r = greedy_select(m, 2);
    CHECK(r.selected == std::vector<Position>{2, 1});
    CHECK(r.gains == std::vector<std::size_t>{3, 1});
    CHECK(r.cast_after.back() == doctest::Approx(1.0));
    CHECK(r.filled_by_fallback == 0);
    CHECK(exhaustive_optimal(m, 2).value == 4);
}

TEST_CASE("greedy_select duplicate rows fall back") {
    auto m = matrix({"101", "101"});
    auto r = greedy_select(m, 2);
    CHECK(r.selected == std::vector<Position>{0, 1});
    CHECK(r.gains == std::vector<std::size_t>{2, 0});
    CHECK(r.filled_by_fallback == 1);
}

TEST_CASE("greedy_select edge cases") {
    auto m = matrix({"1000", "0100", "0010"});
    CHECK_THROWS_AS(greedy_select(m, 0), InputError);
    auto r = greedy_select(m, 5);
    CHECK(r.selected.size() == 3);
    CHECK(r.shortfall == 2);
    std::vector<std::size_t> all{0, 1, 2};
    CHECK(r.coverage_mask.count() == coverage_value(m, all));
}

TEST_CASE("tie-break policies") {
    auto m = matrix({"1100", "0011"});
    m.candidate_ids = {9, 4};
    auto rank = greedy_select(m, 1, TieBreak::PrerecallRank);
    CHECK(rank.selected == std::vector<Position>{9});
    auto low = greedy_select(m, 1, TieBreak::LowestPosition);
    CHECK(low.selected == std::vector<Position>{4});
}

TEST_CASE("greedy invariants on random matrices") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 200; ++t) {
        std::size_t rows = 1 + uniform_below(rng, 20), cols = 1 + uniform_below(rng, 100);
        auto b = oracle::random_bool_matrix(rng, rows, cols, 0.15);
        auto m = oracle::to_comatrix(b, cols);
        std::size_t k = 1 + uniform_below(rng, rows);
        auto r = greedy_select(m, k);
        REQUIRE(r.selected.size() == k);
        for (std::size_t i = 1; i < k; ++i) {
            CHECK(r.gains[i] <= r.gains[i - 1]);
            CHECK(r.cast_after[i] >= r.cast_after[i - 1]);
        }
        std::vector<std::size_t> prefix;
        std::size_t sum = 0;
        for (std::size_t i = 0; i < k; ++i) {
            prefix.push_back(r.selected[i]);
            sum += r.gains[i];
            std::size_t recount = oracle::coverage_naive(b, prefix, cols);
            CHECK(sum == recount);
            CHECK(r.cast_after[i] == doctest::Approx(static_cast<double>(recount) / static_cast<double>(cols)));
        }
        CHECK(r.coverage_mask.count() == sum);
        auto again = greedy_select(m, k);
        CHECK(again.selected == r.selected);
    }
}

TEST_CASE("k equal to rows reaches full coverage") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 50; ++t) {
        std::size_t rows = 1 + uniform_below(rng, 12), cols = 1 + uniform_below(rng, 40);
        auto b = oracle::random_bool_matrix(rng, rows, cols, 0.2);
        auto m = oracle::to_comatrix(b, cols);
        std::vector<std::size_t> all(rows);
        std::iota(all.begin(), all.end(), 0);
        CHECK(greedy_select(m, rows).coverage_mask.count() == oracle::coverage_naive(b, all, cols));
    }
}

TEST_CASE("exhaustive_optimal") {
    auto m = matrix({"1100", "0011", "1110"});
    auto r = exhaustive_optimal(m, 2);
    CHECK(r.value == 4);
    CHECK(r.witness == std::vector<std::size_t>{0, 1});
    CHECK(exhaustive_optimal(m, 1).value == 3);
    auto zero = exhaustive_optimal(matrix({"000", "000", "000"}), 2);
    CHECK(zero.value == 0);
    CHECK(zero.witness == std::vector<std::size_t>{0, 1});
    CoMatrix big(60, 4);
    CHECK_THROWS_AS(exhaustive_optimal(big, 30), InputError);

    std::mt19937_64 rng(47);
    for (int t = 0; t < 100; ++t) {
        std::size_t rows = 1 + uniform_below(rng, 10), cols = 1 + uniform_below(rng, 20);
        auto b = oracle::random_bool_matrix(rng, rows, cols, 0.25);
        std::size_t k = 1 + uniform_below(rng, 4);
        auto e = exhaustive_optimal(oracle::to_comatrix(b, cols), k);
        CHECK(e.value == oracle::optimum_naive(b, cols, k));
        CHECK(oracle::coverage_naive(b, e.witness, cols) == e.value);
    }
}

TEST_CASE("greedy approximation bound") {
    std::mt19937_64 rng(53);
    for (int t = 0; t < 100; ++t) {
        std::size_t rows = 2 + uniform_below(rng, 13), cols = 1 + uniform_below(rng, 64);
        std::size_t k = 1 + uniform_below(rng, 4);
        auto m = oracle::to_comatrix(oracle::random_bool_matrix(rng, rows, cols, 0.2), cols);
        double factor = 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(k), static_cast<double>(k));
        auto g = greedy_select(m, k).coverage_mask.count();
        auto opt = exhaustive_optimal(m, k).value;
        CHECK(static_cast<double>(g) >= factor * static_cast<double>(opt) - 1e-12);
    }
}

TEST_CASE("cast_ratio") {
    CHECK(cast_ratio(bits("111"), 3) == 1.0);
    CHECK(cast_ratio(bits("000"), 3) == 0.0);
    auto db = sexpr_db({{"x", "(D (B))"}});
    CHECK(cast_of_selection(db, std::vector<Position>{0}, fingerprint_tree(parse_sexpr("(A (B) (C))"))) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(cast_of_selection(db, std::vector<Position>{}, fingerprint_tree(parse_sexpr("(A (B) (C))"))) == 0.0);
}

TEST_CASE("prerecall size") {
    CHECK(prerecall_size(2.0, 5) == 10);
    CHECK(prerecall_size(1.5, 3) == 4);
    CHECK(prerecall_size(0.1, 3) == 0);
    CHECK(prerecall_size(0.7, 10) == 7);
}

TEST_CASE("selection config validation") {
    SelectionConfig c;
    CHECK_NOTHROW(c.validate());
    c.k = 0;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.tau = 1.5;
    CHECK_THROWS_AS(c.validate(), InputError);
    c = {};
    c.t = 0.1;  // floor(t*k) = 0
    CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("prerecall_ld") {
    auto db = sexpr_db({{"kitten", "(A)"}, {"sitting", "(A)"}, {"kitchen", "(A)"}, {"mitten", "(A)"}});
    auto order = prerecall_ld(db, "mitten", 4);
    CHECK(order.front() == 3);
    CHECK(order.size() == 4);
    std::vector<Position> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<Position>{0, 1, 2, 3});
    CHECK(prerecall_ld(db, "mitten", 99).size() == 4);

    // oracle ordering: ascending DP distance, ties by position
    std::vector<std::string> src{"kitten", "sitting", "kitchen", "mitten"};
    for (std::string q : {"kitten", "sit", "", "kitchenette"}) {
        std::vector<Position> want{0, 1, 2, 3};
        std::stable_sort(want.begin(), want.end(), [&](Position a, Position b) {
            return oracle::levenshtein_dp(src[a], q) < oracle::levenshtein_dp(src[b], q);
        });
        CHECK(prerecall_ld(db, q, 4) == want);
    }
}

TEST_CASE("CAST-F pipeline") {
    auto db = sexpr_db({{"aaa", "(P (X) (Y))"}, {"aab", "(Q (Y))"}, {"abb", "(P (X) (Z))"}, {"bbb", "(R (Z))"}});
    auto query = parse_sexpr("(P (X) (Z))");
    SelectionConfig cfg;
    cfg.k = 1;
    auto r = select_cast_f(db, "abb", query, cfg);
    CHECK(r.selected == std::vector<Position>{2});
    CHECK(r.cast_after[0] == 1.0);

    SUBCASE("full recall equals greedy on the full matrix") {
        cfg.k = 2;
        cfg.t = 10;
        auto f = select_cast_f(db, "aaa", query, cfg);
        std::vector<Position> ranked = prerecall_ld(db, "aaa", db.size());
        auto m = build_cooccurrence(db, ranked, fingerprint_tree(query));
        auto g = greedy_select(m, 2);
        CHECK(f.selected == g.selected);
        CHECK(f.gains == g.gains);
    }
    SUBCASE("pre-recall limits the candidates") {
        cfg.k = 1;
        cfg.t = 1;
        auto f = select_cast_f(db, "aaa", query, cfg);
        CHECK(f.candidates == std::vector<Position>{0});
        CHECK(f.selected == std::vector<Position>{0});
    }
    SUBCASE("errors") {
        ExemplarDatabase empty;
        CHECK_THROWS_AS(select_cast_f(empty, "x", query, cfg), InputError);
        CHECK_THROWS_AS(select_cast_f(db, "(P", "sexpr", cfg, SexprAdapter{}), ParseError);
    }
}

TEST_CASE("CAST-A stopping rules") {
    auto db = sexpr_db({{"a", "(S (A) (B))"}, {"b", "(T (C))"}, {"c", "(P (A) (B) (C))"}, {"d", "(U (D))"}});
    SelectionConfig cfg;
    cfg.k_max = 4;
    cfg.t = 1;
    SUBCASE("identical exemplar stops at one") {
        cfg.tau = 1.0;
        auto r = select_cast_a(db, "a", parse_sexpr("(P (A) (B) (C))"), cfg);
        CHECK(r.selected == std::vector<Position>{2});
        CHECK(r.threshold_reached);
    }
    SUBCASE("unreachable threshold stops at zero gain") {
        cfg.tau = 1.0;
        auto r = select_cast_a(db, "a", parse_sexpr("(Z (A) (C) (D))"), cfg);
        // A and C come from row 2, D from row 3, then nothing is left to gain
        CHECK(r.selected.size() == 2);
        CHECK_FALSE(r.threshold_reached);
        CHECK(r.cast_after.back() < 1.0);
        CHECK(r.filled_by_fallback == 0);
    }
    SUBCASE("k_max caps the size") {
        cfg.tau = 1.0;
        cfg.k_max = 1;
        auto r = select_cast_a(db, "a", parse_sexpr("(Z (A) (C) (D))"), cfg);
        CHECK(r.selected.size() == 1);
        CHECK_FALSE(r.threshold_reached);
    }
    SUBCASE("threshold checked after each pick") {
        cfg.tau = 0.5;
        auto r = select_cast_a(db, "a", parse_sexpr("(Z (A) (C) (D))"), cfg);
        CHECK(r.selected.size() == 1);
        CHECK(r.threshold_reached);
        CHECK(r.cast_after[0] == doctest::Approx(0.5));
    }
}

TEST_CASE("CAST-F through the minilang adapter") {
    auto corpus = generate_minilang_corpus(60, 21, "m");
    auto db = build_database(corpus, MinilangAdapter{});
    SelectionConfig cfg;
    cfg.k = 4;
    const auto& q = corpus[7];
    auto r = select_cast_f(db, q.source, "minilang", cfg, MinilangAdapter{});
    CHECK(r.selected.front() == 7);
    CHECK(r.cast_after.front() == 1.0);
    CHECK(r.selected.size() == 4);
    CHECK(r.filled_by_fallback == 3);
}
