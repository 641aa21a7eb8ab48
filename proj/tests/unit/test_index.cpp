#include <doctest.h>

#include "castsel/corpus.hpp"
#include "castsel/corpus_gen.hpp"
#include "castsel/errors.hpp"
#include "castsel/index.hpp"
#include "castsel/minilang.hpp"
#include "oracles.hpp"

#include <json.hpp>

#include <filesystem>
#include <numeric>
#include <sstream>

using namespace castsel;

namespace {

CorpusEntry tree_entry(std::string id, std::string sexpr) {
    return CorpusEntry{std::move(id), "sexpr", "sexpr", sexpr, sexpr, std::nullopt};
}

ExemplarDatabase tree_db(const std::vector<std::string>& trees) {
    std::vector<CorpusEntry> c;
    for (std::size_t i = 0; i < trees.size(); ++i) c.push_back(tree_entry("e" + std::to_string(i), trees[i]));
    return build_database(c, SexprAdapter{});
}

std::vector<Position> all_positions(const ExemplarDatabase& db) {
    std::vector<Position> v(db.size());
    std::iota(v.begin(), v.end(), Position{0});
    return v;
}

} // namespace

TEST_CASE("empty corpus gives an empty database") {
    auto db = build_database({}, SexprAdapter{});
    CHECK(db.size() == 0);
    CHECK(db.distinct_fingerprints() == 0);
}

TEST_CASE("shared subtree posts both records") {
    auto db = tree_db({"(A (B))", "(C (B) (D))"});
    auto fb = fingerprint_tree(parse_sexpr("(B)")).root();
    auto post = db.postings(fb);
    CHECK(std::vector<Position>(post.begin(), post.end()) == std::vector<Position>{0, 1});
    // recompute every posting list by scanning profiles
    for (const auto& [fp, list] : db.inverted()) {
        std::vector<Position> want;
        for (Position p = 0; p < db.size(); ++p)
            if (db.record(p).profile.contains(fp)) want.push_back(p);
        CHECK(list == want);
    }
}

TEST_CASE("unparseable entries are skipped and reported") {
    std::vector<CorpusEntry> c{tree_entry("a", "(A)"), tree_entry("b", "(B"), tree_entry("c", "(C)")};
    BuildReport report;
    auto db = build_database(c, SexprAdapter{}, &report);
    CHECK(db.size() == 2);
    CHECK(report.skipped_ids == std::vector<std::string>{"b"});
    CHECK(report.warnings.size() == 1);
    CHECK(db.position_of("c") == 1);
}

TEST_CASE("duplicate ids are rejected by name") {
    std::vector<CorpusEntry> c{tree_entry("a", "(A)"), tree_entry("a", "(B)")};
    try {
        build_database(c, SexprAdapter{});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }
}

TEST_CASE("pre-parsed tree overrides the adapter") {
    CorpusEntry e{"x", "minilang", "pylite", "this is not minilang", "", std::string("(program (pass))")};
    auto db = build_database(std::vector<CorpusEntry>{e}, MinilangAdapter{});
    REQUIRE(db.size() == 1);
    CHECK(to_sexpr(db.record(0).tree) == "(program (pass))");
}

TEST_CASE("co-occurrence examples") {
    auto q = fingerprint_tree(parse_sexpr("(A (B) (C))"));
    SUBCASE("identical candidate covers everything") {
        auto db = tree_db({"(A (B) (C))"});
        auto m = build_cooccurrence(db, all_positions(db), q);
        CHECK(m.rows() == 1);
        CHECK(m.columns() == 3);
        CHECK(count_ones(m.row(0)) == 3);
    }
    SUBCASE("candidate sharing only B") {
        auto db = tree_db({"(D (B))"});
        auto m = build_cooccurrence(db, all_positions(db), q);
        // post-order columns: B, C, A
        CHECK(m.get(0, 0));
        CHECK_FALSE(m.get(0, 1));
        CHECK_FALSE(m.get(0, 2));
    }
    SUBCASE("no candidates") {
        auto db = tree_db({"(A)"});
        auto m = build_cooccurrence(db, {}, q);
        CHECK(m.rows() == 0);
        CHECK(m.columns() == 3);
    }
    SUBCASE("bad candidates") {
        auto db = tree_db({"(A)"});
        std::vector<Position> out_of_range{1};
        CHECK_THROWS_AS(build_cooccurrence(db, out_of_range, q), InputError);
        std::vector<Position> twice{0, 0};
        CHECK_THROWS_AS(build_cooccurrence(db, twice, q), InputError);
    }
}

TEST_CASE("co-occurrence rows follow candidate order") {
    auto db = tree_db({"(A)", "(B)", "(A (B))"});
    auto q = fingerprint_tree(parse_sexpr("(A (B))"));
    std::vector<Position> cand{2, 1};
    auto m = build_cooccurrence(db, cand, q);
    CHECK(m.candidate_ids == cand);
    CHECK(count_ones(m.row(0)) == 2);
    CHECK(count_ones(m.row(1)) == 1);
}

TEST_CASE("inverted-index matrix equals the naive construction") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::string> trees;
        std::size_t n = 1 + uniform_below(rng, 50);
        for (std::size_t i = 0; i < n; ++i) trees.push_back(to_sexpr(random_tree(rng, 60, 4)));
        auto db = tree_db(trees);
        auto query = random_tree(rng, 60, 4);
        std::vector<Position> cand = all_positions(db);
        std::shuffle(cand.begin(), cand.end(), rng);
        cand.resize(uniform_below(rng, cand.size() + 1));
        auto m = build_cooccurrence(db, cand, fingerprint_tree(query));
        auto want = oracle::naive_cooccurrence(db, cand, query);
        REQUIRE(m.rows() == want.size());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.columns(); ++j) CHECK(m.get(i, j) == want[i][j]);
    }
}

TEST_CASE("co-occurrence rows are closed under descendants") {
    std::mt19937_64 rng(29);
    std::vector<std::string> trees;
    for (int i = 0; i < 50; ++i) trees.push_back(to_sexpr(random_tree(rng, 80, 3)));
    auto db = tree_db(trees);
    for (int q = 0; q < 20; ++q) {
        auto query = random_tree(rng, 80, 3);
        auto m = build_cooccurrence(db, all_positions(db), fingerprint_tree(query));
        auto sizes = query.postorder_subtree_sizes();
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.columns(); ++j)
                if (m.get(i, j))
                    for (std::size_t d = j + 1 - sizes[j]; d < j; ++d) CHECK(m.get(i, d));
    }
}

TEST_CASE("index persistence round trip") {
    auto corpus = generate_minilang_corpus(30, 4, "r");
    auto db = build_database(corpus, MinilangAdapter{});
    auto path = std::filesystem::temp_directory_path() / "castsel_unit_roundtrip.idx";
    save_index(db, path);
    auto back = load_index(path);
    std::filesystem::remove(path);
    REQUIRE(back.size() == db.size());
    for (Position p = 0; p < db.size(); ++p) {
        const auto& a = db.record(p);
        const auto& b = back.record(p);
        CHECK(a.id == b.id);
        CHECK(a.source_lang == b.source_lang);
        CHECK(a.target_lang == b.target_lang);
        CHECK(a.source_text == b.source_text);
        CHECK(a.target_text == b.target_text);
        CHECK(a.tree == b.tree);
        CHECK(a.profile == b.profile);
    }
    CHECK(back.inverted() == db.inverted());
    CHECK(index_to_bytes(back) == index_to_bytes(db));
}

TEST_CASE("index loading rejects damaged files") {
    auto db = tree_db({"(A (B))", "(C)"});
    auto bytes = index_to_bytes(db);
    CHECK(bytes.substr(0, 8) == "CASTIDX1");
    CHECK_THROWS_AS(index_from_bytes("NOTANIDX" + bytes.substr(8)), InputError);
    CHECK_THROWS_AS(index_from_bytes(bytes.substr(0, bytes.size() - 3)), InputError);
    CHECK_THROWS_AS(index_from_bytes(bytes + "x"), InputError);
    // flip a bit in the last stored fingerprint of the first record
    auto damaged = bytes;
    auto fp = fingerprint_tree(parse_sexpr("(A (B))")).root();
    std::string needle(reinterpret_cast<const char*>(&fp), 8);
    auto at = damaged.find(needle);
    REQUIRE(at != std::string::npos);
    damaged[at] ^= 1;
    CHECK_THROWS_AS(index_from_bytes(damaged), InvariantError);
}

TEST_CASE("index JSON dump") {
    auto db = tree_db({"(A (B))", "(B)"});
    auto j = nlohmann::json::parse(dump_index_json(db));
    CHECK(j["magic"] == "CASTIDX1");
    CHECK(j["record_count"] == 2);
    CHECK(j["records"][0]["tree"] == "(A (B))");
    CHECK(j["records"][0]["fingerprints"].size() == 2);
    CHECK(j["postings"].size() == db.distinct_fingerprints());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fingerprint_tree(parse_sexpr("(B)")).root()));
    CHECK(j["postings"][hex] == nlohmann::json::array({0, 1}));
}

TEST_CASE("corpus JSONL round trip and validation") {
    std::vector<CorpusEntry> c{{"a", "minilang", "pylite", "let x = 1;\n", "x = 1\n", std::nullopt},
                               {"b", "sexpr", "sexpr", "", "", std::string("(A)")}};
    std::stringstream ss;
    write_corpus_jsonl(ss, c);
    auto back = read_corpus_jsonl(ss);
    REQUIRE(back.size() == 2);
    CHECK(back[0].source == "let x = 1;\n");
    CHECK_FALSE(back[0].source_tree.has_value());
    CHECK(back[1].source_tree == std::optional<std::string>("(A)"));

    std::stringstream dup(R"({"id":"a","source_lang":"x","target_lang":"y","source":"","target":""}
{"id":"a","source_lang":"x","target_lang":"y","source":"","target":""}
)");
    CHECK_THROWS_AS(read_corpus_jsonl(dup), InputError);
    std::stringstream missing(R"({"id":"a","source":""})");
    CHECK_THROWS_AS(read_corpus_jsonl(missing), InputError);
    std::stringstream junk("not json\n");
    CHECK_THROWS_AS(read_corpus_jsonl(junk), InputError);
}

TEST_CASE("threaded build matches sequential build") {
    auto corpus = generate_minilang_corpus(300, 8, "p");
    auto a = build_database(corpus, MinilangAdapter{}, nullptr, 1);
    auto b = build_database(corpus, MinilangAdapter{}, nullptr, 4);
    CHECK(index_to_bytes(a) == index_to_bytes(b));
}
