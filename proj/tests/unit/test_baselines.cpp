#include <doctest.h>

#include "castsel/baselines.hpp"
#include "castsel/corpus_gen.hpp"
#include "castsel/errors.hpp"
#include "castsel/levenshtein.hpp"
#include "castsel/tree_edit.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

using namespace castsel;

namespace {

ExemplarDatabase text_db(const std::vector<std::string>& sources) {
    std::vector<CorpusEntry> c;
    for (std::size_t i = 0; i < sources.size(); ++i)
        c.push_back({"d" + std::to_string(i), "x", "y", sources[i], "", std::string("(doc)")});
    return build_database(c, SexprAdapter{});
}

ExemplarDatabase tree_db(const std::vector<std::string>& trees) {
    std::vector<CorpusEntry> c;
    for (std::size_t i = 0; i < trees.size(); ++i) c.push_back({"t" + std::to_string(i), "x", "y", "", "", trees[i]});
    return build_database(c, SexprAdapter{});
}

std::string random_string(std::mt19937_64& rng, std::size_t max_len) {
    std::string s(uniform_below(rng, max_len + 1), ' ');
    for (char& c : s) c = static_cast<char>('a' + uniform_below(rng, 4));
    return s;
}

void check_distinct_in_range(const std::vector<Position>& v, std::size_t n, std::size_t expected_size) {
    CHECK(v.size() == expected_size);
    std::set<Position> s(v.begin(), v.end());
    CHECK(s.size() == v.size());
    for (Position p : v) CHECK(p < n);
}

} // namespace

TEST_CASE("levenshtein matches the DP oracle") {
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("", "abc") == 3);
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("Abc", "abc") == 1);
    std::mt19937_64 rng(59);
    for (int i = 0; i < 500; ++i) {
        auto a = random_string(rng, 30), b = random_string(rng, 30);
        CHECK(levenshtein(a, b) == oracle::levenshtein_dp(a, b));
    }
}

TEST_CASE("random selection") {
    auto db = text_db(std::vector<std::string>(10, "x"));
    auto all = select_random(db, 10, 1);
    check_distinct_in_range(all, 10, 10);
    CHECK(select_random(db, 4, 77) == select_random(db, 4, 77));
    CHECK_THROWS_AS(select_random(db, 11, 1), InputError);
    CHECK_THROWS_AS(select_random(db, 0, 1), InputError);
}

TEST_CASE("random selection is uniform") {
    auto db = text_db(std::vector<std::string>(10, "x"));
    std::vector<double> counts(10, 0);
    const int draws = 10000;
    for (int s = 0; s < draws; ++s) counts[select_random(db, 1, static_cast<std::uint64_t>(s))[0]] += 1;
    double chi2 = 0;
    const double expect = draws / 10.0;
    for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
    // 9 degrees of freedom: mean 9, sd sqrt(18); allow 3 sd
    CHECK(chi2 < 9 + 3 * std::sqrt(18.0));
}

TEST_CASE("fixed selection") {
    auto db = text_db({"a", "b", "c"});
    std::vector<std::string> ids{"d2", "d0"};
    CHECK(select_fixed(db, ids) == std::vector<Position>{2, 0});
    std::vector<std::string> one{"d1"};
    CHECK(select_fixed(db, one) == std::vector<Position>{1});
    std::vector<std::string> bad{"nope"};
    CHECK_THROWS_AS(select_fixed(db, bad), InputError);
}

TEST_CASE("ld selection") {
    auto db = text_db({"kitten", "sitting", "mitten", "kitten"});
    auto r = select_ld(db, "kitten", 4);
    CHECK(r == std::vector<Position>{0, 3, 2, 1});
    CHECK(select_ld(db, "kitten", 4) == prerecall_ld(db, "kitten", 4));
    CHECK_THROWS_AS(select_ld(db, "x", 5), InputError);

    std::mt19937_64 rng(61);
    std::vector<std::string> src;
    for (int i = 0; i < 30; ++i) src.push_back(random_string(rng, 12));
    auto db2 = text_db(src);
    auto q = random_string(rng, 12);
    std::vector<Position> want(src.size());
    std::iota(want.begin(), want.end(), Position{0});
    std::stable_sort(want.begin(), want.end(), [&](Position a, Position b) {
        return oracle::levenshtein_dp(src[a], q) < oracle::levenshtein_dp(src[b], q);
    });
    CHECK(select_ld(db2, q, src.size()) == want);
}

TEST_CASE("bm25 tokenizer") {
    CHECK(bm25_tokenize("Let x_1 = foo(X, 1);") == std::vector<std::string>{"let", "x_1", "foo", "x", "1"});
    CHECK(bm25_tokenize("+-*/ ()").empty());
}

TEST_CASE("bm25 matches the hand-computed table") {
    auto db = text_db({"let x = foo(x, 1);", "let y = bar(y);", "print(x + y);"});
    Bm25Index idx(db);
    CHECK(idx.idf("let") == doctest::Approx(0.470003629245736).epsilon(1e-12));
    CHECK(idx.idf("x") == doctest::Approx(0.470003629245736).epsilon(1e-12));
    CHECK(idx.idf("foo") == doctest::Approx(0.980829253011726).epsilon(1e-12));
    CHECK(idx.idf("print") == doctest::Approx(0.980829253011726).epsilon(1e-12));
    CHECK(idx.idf("unseen") == doctest::Approx(2.079441541679836).epsilon(1e-12));

    struct Row {
        const char* query;
        double s[3];
        Position top;
    };
    const Row table[] = {
        {"foo(x)", {1.493624759785731, 0.0, 0.523548346501579}, 0},
        {"let y", {0.426395045088915, 1.116258619458622, 0.523548346501579}, 1},
        {"LET x y", {1.030195327915553, 1.116258619458622, 1.047096693003158}, 1},
    };
    for (const auto& row : table) {
        CAPTURE(row.query);
        auto s = idx.scores(row.query);
        for (int i = 0; i < 3; ++i) CHECK(s[static_cast<std::size_t>(i)] == doctest::Approx(row.s[i]).epsilon(1e-12));
        CHECK(select_bm25(idx, row.query, 1) == std::vector<Position>{row.top});
    }
    CHECK_THROWS_AS(idx.scores("+ -"), InputError);
}

TEST_CASE("bm25 ranks a duplicate first") {
    auto db = text_db({"let a = b;", "print(q * r);", "while z { z = z - 1; }"});
    CHECK(select_bm25(db, "print(q * r);", 1) == std::vector<Position>{1});
    check_distinct_in_range(select_bm25(db, "z", 5), 3, 3);
}

TEST_CASE("tree edit distance basics") {
    auto d = [](const char* a, const char* b) { return tree_edit_distance(parse_sexpr(a), parse_sexpr(b)); };
    CHECK(d("(A)", "(A)") == 0);
    CHECK(d("(A)", "(A (B))") == 1);
    CHECK(d("(A)", "(B)") == 1);
    CHECK(d("(A (B) (C))", "(A (C) (B))") == 2);
    // classic example: f(d(a c(b)) e) vs f(c(d(a b)) e)
    CHECK(d("(f (d (a) (c (b))) (e))", "(f (c (d (a) (b))) (e))") == 2);
}

TEST_CASE("tree edit distance matches mapping enumeration") {
    std::mt19937_64 rng(67);
    for (int i = 0; i < 150; ++i) {
        auto a = random_tree(rng, 7, 3);
        auto b = random_tree(rng, 7, 3);
        CAPTURE(to_sexpr(a));
        CAPTURE(to_sexpr(b));
        CHECK(tree_edit_distance(a, b) == oracle::ted_bruteforce(a, b));
    }
}

TEST_CASE("tree edit distance metric sanity") {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 100; ++i) {
        auto a = random_tree(rng, 25, 4), b = random_tree(rng, 25, 4), c = random_tree(rng, 25, 4);
        CHECK(tree_edit_distance(a, a) == 0);
        CHECK(tree_edit_distance(a, b) == tree_edit_distance(b, a));
        CHECK(tree_edit_distance(a, c) <= tree_edit_distance(a, b) + tree_edit_distance(b, c));
    }
}

TEST_CASE("ast_ed selection") {
    auto db = tree_db({"(A (B) (C))", "(A (B))", "(X (Y) (Z) (W))", "(A (B))"});
    auto r = select_ast_ed(db, parse_sexpr("(A (B))"), 4);
    CHECK(r == std::vector<Position>{1, 3, 0, 2});
    check_distinct_in_range(select_ast_ed(db, parse_sexpr("(Q)"), 9), 4, 4);
}

TEST_CASE("cosine") {
    std::vector<double> a{1, 0}, b{0, 2}, c{3, 4}, z{0, 0};
    CHECK(*cosine(a, b) == 0.0);
    CHECK(*cosine(c, c) == doctest::Approx(1.0));
    CHECK(*cosine(a, c) == doctest::Approx(0.6));
    CHECK_FALSE(cosine(a, z).has_value());
}

TEST_CASE("embedding top-k ordering") {
    auto db = text_db({"a", "b", "c", "d", "e", "f"});
    EmbeddingTable t(2);
    t.add("d0", {1, 0});    // cos  0.6
    t.add("d1", {0, 1});    // cos  0.8
    t.add("d2", {3, 4});    // cos  1.0
    t.add("d3", {-1, 0});   // cos -0.6
    t.add("d4", {0, 0});    // zero norm, last
    // d5 has no embedding and is never returned
    std::vector<double> q{3, 4};
    CHECK(select_embed_topk(db, t, q, 10) == std::vector<Position>{2, 1, 0, 3, 4});
    CHECK(select_embed_topk(db, t, q, 1) == std::vector<Position>{2});
    std::vector<double> bad{1, 2, 3};
    CHECK_THROWS_AS(select_embed_topk(db, t, bad, 1), InputError);
}

TEST_CASE("embedding table IO") {
    EmbeddingTable t(3);
    t.add("a", {0.5, -1, 2});
    t.add("b", {1e-7, 0, 3.25});
    std::stringstream ss;
    t.write(ss);
    auto back = EmbeddingTable::read(ss);
    REQUIRE(back.size() == 2);
    CHECK(std::vector<double>(back.row(1).begin(), back.row(1).end()) == std::vector<double>{1e-7, 0, 3.25});
    std::stringstream bad("dim 2\na 1\n");
    CHECK_THROWS_AS(EmbeddingTable::read(bad), InputError);
    std::stringstream noheader("a 1 2\n");
    CHECK_THROWS_AS(EmbeddingTable::read(noheader), InputError);
    CHECK_THROWS_AS(t.add("a", {1, 1, 1}), InputError);
}

TEST_CASE("diversity selection") {
    std::mt19937_64 rng(73);
    std::vector<std::string> names;
    EmbeddingTable t(2);
    // two tight blobs far apart: around (10, 1) and (1, 10)
    for (int i = 0; i < 20; ++i) {
        double jx = uniform_unit(rng) * 0.1, jy = uniform_unit(rng) * 0.1;
        names.push_back("d" + std::to_string(i));
        if (i % 2 == 0)
            t.add(names.back(), {10 + jx, 1 + jy});
        else
            t.add(names.back(), {1 + jx, 10 + jy});
    }
    auto db = text_db(std::vector<std::string>(20, "x"));
    std::vector<double> q{10, 1};
    auto two = select_diversity(db, t, q, 2, 5);
    REQUIRE(two.size() == 2);
    CHECK(two[0] % 2 != two[1] % 2);
    CHECK(two[0] % 2 == 0);  // cosine order puts the near blob first
    CHECK(select_diversity(db, t, q, 2, 5) == two);

    auto one = select_diversity(db, t, q, 1, 5);
    CHECK(one == select_embed_topk(db, t, q, 1));

    check_distinct_in_range(select_diversity(db, t, q, 7, 9), 20, 7);
    CHECK_THROWS_AS(select_diversity(db, t, q, 21, 5), InputError);
}

TEST_CASE("kmeans separates blobs and is seed-deterministic") {
    std::vector<double> pts{0, 0, 0.1, 0, 0, 0.1, 5, 5, 5.1, 5, 5, 5.1};
    auto a = kmeans(pts, 2, 2, 3);
    CHECK(a.assignment[0] == a.assignment[1]);
    CHECK(a.assignment[1] == a.assignment[2]);
    CHECK(a.assignment[3] == a.assignment[4]);
    CHECK(a.assignment[0] != a.assignment[3]);
    auto b = kmeans(pts, 2, 2, 3);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
    CHECK_THROWS_AS(kmeans(pts, 2, 7, 3), InputError);
}
