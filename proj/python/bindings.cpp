#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "castsel/baselines.hpp"
#include "castsel/bench.hpp"
#include "castsel/corpus.hpp"
#include "castsel/errors.hpp"
#include "castsel/fingerprint.hpp"
#include "castsel/index.hpp"
#include "castsel/levenshtein.hpp"
#include "castsel/metrics.hpp"
#include "castsel/minilang.hpp"
#include "castsel/prompt.hpp"
#include "castsel/selector.hpp"
#include "castsel/tree_edit.hpp"

namespace py = pybind11;
using namespace castsel;

namespace {

const AdapterRegistry& adapters() {
    static const AdapterRegistry registry = AdapterRegistry::with_builtin_languages();
    return registry;
}

CoMatrix matrix_from_rows(const std::vector<std::vector<int>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    CoMatrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw InputError("all rows must have the same width");
        for (std::size_t j = 0; j < cols; ++j) {
            if (rows[i][j]) m.set(i, j);
        }
    }
    return m;
}

std::vector<std::vector<int>> matrix_to_rows(const CoMatrix& m) {
    std::vector<std::vector<int>> out(m.rows(), std::vector<int>(m.columns()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.columns(); ++j) out[i][j] = m.get(i, j) ? 1 : 0;
    }
    return out;
}

BitVector mask_of(const CoMatrix& m, const std::vector<std::size_t>& rows) {
    BitVector mask(m.columns());
    for (std::size_t r : rows) {
        if (r >= m.rows()) throw InputError("row index out of range");
        mask |= m.row(r);
    }
    return mask;
}

CorpusEntry entry_from_kwargs(std::string id, std::string source_lang, std::string target_lang, std::string source,
                              std::string target, std::optional<std::string> source_tree) {
    return CorpusEntry{std::move(id),     std::move(source_lang), std::move(target_lang),
                       std::move(source), std::move(target),      std::move(source_tree)};
}

} // namespace

PYBIND11_MODULE(_castsel, m) {
    m.doc() = "Exemplar selection by AST subtree coverage (C++ core)";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", input_error.ptr());
    py::register_exception<InvariantError>(m, "InvariantError", error.ptr());

    // -- trees --------------------------------------------------------------
    py::class_<TypedTree>(m, "TypedTree")
        .def("__len__", &TypedTree::size)
        .def("__eq__", [](const TypedTree& a, const TypedTree& b) { return a == b; })
        .def("__repr__", [](const TypedTree& t) { return "TypedTree(" + to_sexpr(t) + ")"; })
        .def("to_sexpr", [](const TypedTree& t) { return to_sexpr(t); });

    m.def("parse_sexpr", &parse_sexpr, py::arg("text"));
    m.def("to_sexpr", &to_sexpr, py::arg("tree"));
    m.def("node_count", &node_count, py::arg("tree"));
    m.def("parse_source", [](const std::string& source, const std::string& language) {
        return adapters().parse(source, language);
    }, py::arg("source"), py::arg("language"), "Parse with a built-in adapter (sexpr, minilang).");

    // -- fingerprints -------------------------------------------------------
    py::class_<FingerprintProfile>(m, "FingerprintProfile")
        .def_readonly("per_node", &FingerprintProfile::per_node)
        .def_readonly("set", &FingerprintProfile::set)
        .def("root", &FingerprintProfile::root)
        .def("__len__", [](const FingerprintProfile& p) { return subtree_multiset_size(p); });
    m.def("fingerprint_tree", [](const TypedTree& t) { return fingerprint_tree(t); }, py::arg("tree"));
    m.def("fingerprint_node_type", [](const std::string& label) { return fingerprint_node_type(NodeType(label)); },
          py::arg("label"));

    // -- corpus and index ---------------------------------------------------
    py::class_<CorpusEntry>(m, "CorpusEntry")
        .def(py::init(&entry_from_kwargs), py::arg("id"), py::arg("source_lang"), py::arg("target_lang"),
             py::arg("source"), py::arg("target"), py::arg("source_tree") = std::nullopt)
        .def_readwrite("id", &CorpusEntry::id)
        .def_readwrite("source_lang", &CorpusEntry::source_lang)
        .def_readwrite("target_lang", &CorpusEntry::target_lang)
        .def_readwrite("source", &CorpusEntry::source)
        .def_readwrite("target", &CorpusEntry::target)
        .def_readwrite("source_tree", &CorpusEntry::source_tree);
    m.def("read_corpus_jsonl", py::overload_cast<const std::filesystem::path&>(&read_corpus_jsonl), py::arg("path"));

    py::class_<ExemplarDatabase>(m, "ExemplarDatabase")
        .def("__len__", &ExemplarDatabase::size)
        .def("ids", [](const ExemplarDatabase& db) {
            std::vector<std::string> ids;
            for (const auto& r : db.records()) ids.push_back(r.id);
            return ids;
        })
        .def("position_of", &ExemplarDatabase::position_of, py::arg("id"))
        .def("postings", [](const ExemplarDatabase& db, Fingerprint fp) {
            auto s = db.postings(fp);
            return std::vector<Position>(s.begin(), s.end());
        }, py::arg("fingerprint"))
        .def("profile", [](const ExemplarDatabase& db, Position p) { return db.record(p).profile; }, py::arg("position"))
        .def("tree", [](const ExemplarDatabase& db, Position p) { return db.record(p).tree; }, py::arg("position"))
        .def_property_readonly("distinct_fingerprints", &ExemplarDatabase::distinct_fingerprints);

    m.def("build_database", [](const std::vector<CorpusEntry>& corpus, unsigned threads) {
        BuildReport report;
        ExemplarDatabase db = build_database(corpus, adapters(), &report, threads);
        return py::make_tuple(std::move(db), report.skipped_ids);
    }, py::arg("corpus"), py::arg("threads") = 1, "Returns (database, skipped_ids).");
    m.def("save_index", &save_index, py::arg("db"), py::arg("path"));
    m.def("load_index", &load_index, py::arg("path"));

    py::class_<CoMatrix>(m, "CoMatrix")
        .def_static("from_rows", &matrix_from_rows, py::arg("rows"))
        .def_property_readonly("rows", &CoMatrix::rows)
        .def_property_readonly("columns", &CoMatrix::columns)
        .def_readonly("candidate_ids", &CoMatrix::candidate_ids)
        .def("get", &CoMatrix::get)
        .def("to_rows", &matrix_to_rows);
    m.def("build_cooccurrence", [](const ExemplarDatabase& db, const std::vector<Position>& candidates,
                                   const FingerprintProfile& query) { return build_cooccurrence(db, candidates, query); },
          py::arg("db"), py::arg("candidates"), py::arg("query_profile"));

    // -- selection ----------------------------------------------------------
    py::enum_<TieBreak>(m, "TieBreak")
        .value("PRERECALL_RANK", TieBreak::PrerecallRank)
        .value("LOWEST_POSITION", TieBreak::LowestPosition);

    py::class_<SelectionConfig>(m, "SelectionConfig")
        .def(py::init([](std::size_t k, double t, double tau, std::size_t k_max, TieBreak tie_break) {
                 SelectionConfig c;
                 c.k = k;
                 c.t = t;
                 c.tau = tau;
                 c.k_max = k_max;
                 c.tie_break = tie_break;
                 c.validate();
                 return c;
             }),
             py::arg("k") = 5, py::arg("t") = 2.0, py::arg("tau") = 0.98, py::arg("k_max") = 20,
             py::arg("tie_break") = TieBreak::PrerecallRank)
        .def_readwrite("k", &SelectionConfig::k)
        .def_readwrite("t", &SelectionConfig::t)
        .def_readwrite("tau", &SelectionConfig::tau)
        .def_readwrite("k_max", &SelectionConfig::k_max)
        .def_readwrite("tie_break", &SelectionConfig::tie_break);

    py::class_<SelectionResult>(m, "SelectionResult")
        .def_readonly("selected", &SelectionResult::selected)
        .def_readonly("gains", &SelectionResult::gains)
        .def_readonly("cast_after", &SelectionResult::cast_after)
        .def_readonly("filled_by_fallback", &SelectionResult::filled_by_fallback)
        .def_readonly("shortfall", &SelectionResult::shortfall)
        .def_readonly("threshold_reached", &SelectionResult::threshold_reached)
        .def_readonly("candidates", &SelectionResult::candidates)
        .def_property_readonly("covered", [](const SelectionResult& r) { return r.coverage_mask.count(); });

    m.def("coverage_value", [](const CoMatrix& mat, const std::vector<std::size_t>& rows) {
        return coverage_value(mat, rows);
    }, py::arg("matrix"), py::arg("rows"));
    m.def("marginal_gain", [](const CoMatrix& mat, const std::vector<std::size_t>& selected, std::size_t row) {
        return marginal_gain(mat, mask_of(mat, selected), row);
    }, py::arg("matrix"), py::arg("selected"), py::arg("row"), "Gain of adding `row` to the rows in `selected`.");
    m.def("greedy_select", &greedy_select, py::arg("matrix"), py::arg("k"),
          py::arg("tie_break") = TieBreak::PrerecallRank);
    m.def("exhaustive_optimal", [](const CoMatrix& mat, std::size_t k) {
        auto r = exhaustive_optimal(mat, k);
        return py::make_tuple(r.value, r.witness);
    }, py::arg("matrix"), py::arg("k"), "Returns (value, witness rows).");
    m.def("prerecall_ld", &prerecall_ld, py::arg("db"), py::arg("query_source"), py::arg("m"));
    m.def("select_cast_f", [](const ExemplarDatabase& db, const std::string& source, const std::string& lang,
                              const SelectionConfig& cfg) { return select_cast_f(db, source, lang, cfg, adapters()); },
          py::arg("db"), py::arg("query_source"), py::arg("query_lang"), py::arg("config"));
    m.def("select_cast_a", [](const ExemplarDatabase& db, const std::string& source, const std::string& lang,
                              const SelectionConfig& cfg) { return select_cast_a(db, source, lang, cfg, adapters()); },
          py::arg("db"), py::arg("query_source"), py::arg("query_lang"), py::arg("config"));
    m.def("cast_of_selection", [](const ExemplarDatabase& db, const std::vector<Position>& sel,
                                  const FingerprintProfile& q) { return cast_of_selection(db, sel, q); },
          py::arg("db"), py::arg("selected"), py::arg("query_profile"));

    // -- baselines ----------------------------------------------------------
    m.def("select_random", &select_random, py::arg("db"), py::arg("k"), py::arg("seed"));
    m.def("select_fixed", [](const ExemplarDatabase& db, const std::vector<std::string>& ids) {
        return select_fixed(db, ids);
    }, py::arg("db"), py::arg("ids"));
    m.def("select_ld", py::overload_cast<const ExemplarDatabase&, std::string_view, std::size_t>(&select_ld),
          py::arg("db"), py::arg("query_source"), py::arg("k"));
    m.def("select_bm25", py::overload_cast<const ExemplarDatabase&, std::string_view, std::size_t>(&select_bm25),
          py::arg("db"), py::arg("query_source"), py::arg("k"));
    m.def("select_ast_ed", &select_ast_ed, py::arg("db"), py::arg("query_tree"), py::arg("k"));
    m.def("levenshtein", &levenshtein, py::arg("a"), py::arg("b"));
    m.def("tree_edit_distance", &tree_edit_distance, py::arg("a"), py::arg("b"));

    // -- harness ------------------------------------------------------------
    m.def("exact_match", &exact_match, py::arg("prediction"), py::arg("gold"));
    m.def("assemble_prompt", [](const std::vector<Position>& selected, const ExemplarDatabase& db,
                                const std::string& source, const std::string& source_lang,
                                const std::string& target_lang, bool reversed) {
        return assemble_prompt(selected, db, PromptQuery{source, source_lang, target_lang},
                               PromptTemplate::default_template(),
                               reversed ? PromptOrder::Reversed : PromptOrder::Selection);
    }, py::arg("selected"), py::arg("db"), py::arg("query_source"), py::arg("source_lang"), py::arg("target_lang"),
          py::arg("reversed") = false, "Render the default prompt template.");
    m.def("coverage_curve", [](const ExemplarDatabase& db, const std::vector<CorpusEntry>& queries,
                               const std::vector<std::string>& strategies, const std::vector<std::size_t>& shots,
                               double t, double tau, std::uint64_t seed) {
        StrategyContext ctx{db};
        ctx.t = t;
        ctx.tau = tau;
        ctx.seed = seed;
        CurveOptions opt;
        for (const auto& s : strategies) opt.strategies.push_back(parse_strategy(s));
        opt.shots = shots;
        std::vector<py::tuple> rows;
        for (const auto& p : coverage_curve(ctx, queries, adapters(), opt)) {
            rows.push_back(py::make_tuple(std::string(strategy_name(p.strategy)), p.shot, p.mean_cast, p.mean_selected));
        }
        return rows;
    }, py::arg("db"), py::arg("queries"), py::arg("strategies"), py::arg("shots"), py::arg("t") = 2.0,
          py::arg("tau") = 0.98, py::arg("seed") = 0,
          "Rows of (strategy, shot, mean_cast, mean_selected).");
}
