// castsel: command-line front end for exemplar selection.
//
//   castsel index build <corpus.jsonl> -o <index>
//   castsel index dump <index>
//   castsel select --index <f> --query <file> --strategy <s> -k <n> [--tau x] [-t f] --trace <json>
//   castsel prompt --selection <trace> [--template <file>] [-o <out>]
//   castsel bench coverage --index <f> --queries <jsonl> --strategies a,b --shots 1,3,5 --csv <out>
//   castsel em --pred <file> --gold <file>
//   castsel gen minilang|trees|embeddings ...
//
// Exit codes: 0 ok, 2 input error, 3 internal invariant violation.

#include "castsel/baselines.hpp"
#include "castsel/bench.hpp"
#include "castsel/corpus.hpp"
#include "castsel/corpus_gen.hpp"
#include "castsel/errors.hpp"
#include "castsel/fingerprint.hpp"
#include "castsel/index.hpp"
#include "castsel/metrics.hpp"
#include "castsel/prompt.hpp"
#include "castsel/selector.hpp"
#include "castsel/trace.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace castsel;

constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

std::uint64_t default_seed() {
    if (const char* s = std::getenv("CAST_SEED"); s && *s) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(s, &used, 0);
            if (used == std::string_view(s).size()) return v;
        } catch (const std::exception&) {
        }
        throw InputError(std::string("CAST_SEED is not an unsigned integer: ") + s);
    }
    return 0;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bool has_json_extension(const std::string& path) {
    auto ends = [&](std::string_view suf) {
        return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
    };
    return ends(".jsonl") || ends(".json");
}

struct EmbeddingOptions {
    std::string exemplars;
    std::string queries;
};

struct LoadedEmbeddings {
    std::optional<EmbeddingTable> exemplars;
    std::optional<EmbeddingTable> queries;
};

LoadedEmbeddings load_embeddings(const EmbeddingOptions& o) {
    LoadedEmbeddings e;
    if (!o.exemplars.empty()) e.exemplars = EmbeddingTable::read(o.exemplars);
    if (!o.queries.empty()) e.queries = EmbeddingTable::read(o.queries);
    return e;
}

// ---------------------------------------------------------------------------

struct IndexBuildArgs {
    std::string corpus;
    std::string output;
    std::string json_dump;
    unsigned threads = 1;
};

int run_index_build(const IndexBuildArgs& a) {
    auto corpus = read_corpus_jsonl(a.corpus);
    auto adapters = AdapterRegistry::with_builtin_languages();
    BuildReport report;
    ExemplarDatabase db = build_database(corpus, adapters, &report, a.threads);
    save_index(db, a.output);
    if (!a.json_dump.empty()) write_file(a.json_dump, dump_index_json(db));
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << "indexed " << db.size() << " exemplars (" << report.skipped_ids.size() << " skipped), "
              << db.distinct_fingerprints() << " distinct subtree fingerprints\n";
    return 0;
}

struct SelectArgs {
    std::string index;
    std::string query;
    std::string strategy;
    std::size_t k = 0;
    double t = 2.0;
    double tau = 0.98;
    std::string tie_break = "prerecall_rank";
    std::string prompt_order = "selection";
    std::string lang = "minilang";
    std::string target_lang;
    std::optional<std::uint64_t> seed;
    std::string fixed_ids;
    EmbeddingOptions embeddings;
    std::string trace;
    bool timing = false;
};

int run_select(const SelectArgs& a) {
    const auto started = std::chrono::steady_clock::now();
    ExemplarDatabase db = load_index(a.index);
    if (db.empty()) throw InputError("index is empty");

    CorpusEntry query;
    if (has_json_extension(a.query)) {
        auto entries = read_corpus_jsonl(a.query);
        if (entries.empty()) throw InputError("query file has no entries");
        query = std::move(entries.front());
    } else {
        query.id = "query";
        query.source = read_file(a.query);
        query.source_lang = a.lang;
        query.target_lang = a.target_lang.empty() ? db.record(0).target_lang : a.target_lang;
    }

    const std::uint64_t seed = a.seed ? *a.seed : default_seed();
    auto emb = load_embeddings(a.embeddings);
    StrategyContext ctx{db};
    ctx.t = a.t;
    ctx.tau = a.tau;
    ctx.tie_break = parse_tie_break(a.tie_break);
    ctx.seed = seed;
    ctx.fixed_ids = split_csv(a.fixed_ids);
    ctx.embeddings = emb.exemplars ? &*emb.exemplars : nullptr;
    ctx.query_embeddings = emb.queries ? &*emb.queries : nullptr;

    const Strategy strategy = parse_strategy(a.strategy);
    auto adapters = AdapterRegistry::with_builtin_languages();
    PreparedQuery pq = prepare_query(db, query, adapters);
    SelectionResult result = run_strategy(ctx, pq, strategy, a.k);

    TraceRequest req;
    req.strategy = std::string(strategy_name(strategy));
    req.config.k = a.k;
    req.config.t = a.t;
    req.config.tau = a.tau;
    req.config.k_max = a.k;
    req.config.tie_break = ctx.tie_break;
    req.config.prompt_order = parse_prompt_order(a.prompt_order);
    req.seed = seed;
    req.index_path = a.index;
    req.query_id = query.id;
    req.query = PromptQuery{query.source, query.source_lang, query.target_lang};

    std::optional<double> elapsed;
    if (a.timing) {
        elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    }
    const std::string json = selection_trace_json(req, result, db, elapsed);
    if (a.trace.empty() || a.trace == "-") {
        std::cout << json;
    } else {
        write_file(a.trace, json);
    }
    return 0;
}

struct PromptArgs {
    std::string selection;
    std::string tpl;
    std::string index;
    std::string output;
    std::string order;
};

int run_prompt(const PromptArgs& a) {
    ParsedTrace trace = parse_selection_trace(read_file(a.selection));
    ExemplarDatabase db = load_index(a.index.empty() ? trace.index_path : a.index);
    std::vector<Position> positions;
    for (const auto& id : trace.selected_ids) positions.push_back(db.position_of(id));
    PromptTemplate tpl = a.tpl.empty() ? PromptTemplate::default_template() : PromptTemplate::read(a.tpl);
    PromptOrder order = a.order.empty() ? trace.prompt_order : parse_prompt_order(a.order);
    std::string prompt = assemble_prompt(positions, db, trace.query, tpl, order);
    if (a.output.empty() || a.output == "-") {
        std::cout << prompt;
    } else {
        write_file(a.output, prompt);
    }
    return 0;
}

struct BenchArgs {
    std::string index;
    std::string queries;
    std::string strategies = "cast_f,ld";
    std::string shots = "1,3,5,10,15,20";
    std::string csv;
    std::string svg;
    double t = 2.0;
    double tau = 0.98;
    std::optional<std::uint64_t> seed;
    std::string fixed_ids;
    EmbeddingOptions embeddings;
    unsigned threads = 1;
};

int run_bench(const BenchArgs& a) {
    ExemplarDatabase db = load_index(a.index);
    auto queries = read_corpus_jsonl(a.queries);
    auto emb = load_embeddings(a.embeddings);
    StrategyContext ctx{db};
    ctx.t = a.t;
    ctx.tau = a.tau;
    ctx.seed = a.seed ? *a.seed : default_seed();
    ctx.fixed_ids = split_csv(a.fixed_ids);
    ctx.embeddings = emb.exemplars ? &*emb.exemplars : nullptr;
    ctx.query_embeddings = emb.queries ? &*emb.queries : nullptr;

    CurveOptions opt;
    for (const auto& s : split_csv(a.strategies)) opt.strategies.push_back(parse_strategy(s));
    if (opt.strategies.empty()) throw InputError("no strategies given");
    for (const auto& s : split_csv(a.shots)) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            opt.shots.push_back(v);
        } catch (const std::exception&) {
            throw InputError("bad shot count '" + s + "'");
        }
    }
    opt.threads = a.threads;
    auto adapters = AdapterRegistry::with_builtin_languages();
    auto points = coverage_curve(ctx, queries, adapters, opt);
    const std::string csv = curve_to_csv(points);
    if (a.csv.empty() || a.csv == "-") {
        std::cout << csv;
    } else {
        write_file(a.csv, csv);
    }
    if (!a.svg.empty()) write_file(a.svg, curve_to_svg(points));
    return 0;
}

struct GenArgs {
    std::string kind;
    std::size_t count = 150;
    std::uint64_t seed = 1;
    std::string prefix = "ex";
    std::size_t max_nodes = 40;
    std::size_t vocab = 8;
    std::size_t dim = 32;
    std::string corpus;
    std::string output;
};

int run_gen(const GenArgs& a) {
    std::ostringstream out;
    if (a.kind == "minilang") {
        write_corpus_jsonl(out, generate_minilang_corpus(a.count, a.seed, a.prefix));
    } else if (a.kind == "trees") {
        write_corpus_jsonl(out, generate_tree_corpus(a.count, a.seed, a.max_nodes, a.vocab));
    } else if (a.kind == "embeddings") {
        if (a.corpus.empty()) throw InputError("gen embeddings needs --corpus");
        auto adapters = AdapterRegistry::with_builtin_languages();
        node_type_embeddings(read_corpus_jsonl(a.corpus), a.dim, adapters).write(out);
    } else {
        throw InputError("unknown generator '" + a.kind + "' (expected minilang, trees or embeddings)");
    }
    if (a.output.empty() || a.output == "-") {
        std::cout << out.str();
    } else {
        write_file(a.output, out.str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exemplar selection by AST subtree coverage"};
    app.require_subcommand(1);

    auto* index = app.add_subcommand("index", "Build or inspect an exemplar index");
    index->require_subcommand(1);
    IndexBuildArgs build_args;
    auto* build = index->add_subcommand("build", "Parse, fingerprint and index a corpus");
    build->add_option("corpus", build_args.corpus, "Corpus JSONL")->required();
    build->add_option("-o,--output", build_args.output, "Index file")->required();
    build->add_option("--json", build_args.json_dump, "Also write a JSON dump");
    build->add_option("--threads", build_args.threads, "Worker threads");
    std::string dump_path;
    auto* dump = index->add_subcommand("dump", "Print an index as JSON");
    dump->add_option("index", dump_path, "Index file")->required();

    SelectArgs sel;
    auto* select = app.add_subcommand("select", "Select exemplars for one query");
    select->add_option("--index", sel.index)->required();
    select->add_option("--query", sel.query, "Query: corpus JSONL (first entry) or raw source file")->required();
    select->add_option("--strategy", sel.strategy)->required();
    select->add_option("-k", sel.k, "Shots (the cap k_max for cast_a)")->required()->check(CLI::PositiveNumber);
    select->add_option("-t", sel.t, "Pre-recall factor");
    select->add_option("--tau", sel.tau, "Coverage threshold for cast_a");
    select->add_option("--tie-break", sel.tie_break, "prerecall_rank | lowest_position");
    select->add_option("--prompt-order", sel.prompt_order, "selection | reversed");
    select->add_option("--lang", sel.lang, "Language of a raw query file");
    select->add_option("--target-lang", sel.target_lang);
    select->add_option("--seed", sel.seed, "Overrides CAST_SEED");
    select->add_option("--fixed-ids", sel.fixed_ids, "Comma-separated ids for the fixed strategy");
    select->add_option("--embeddings", sel.embeddings.exemplars);
    select->add_option("--query-embeddings", sel.embeddings.queries);
    select->add_option("--trace", sel.trace, "Trace output (stdout when omitted)");
    select->add_flag("--timing", sel.timing, "Record wall time in the trace");

    PromptArgs pr;
    auto* prompt = app.add_subcommand("prompt", "Render a prompt from a selection trace");
    prompt->add_option("--selection", pr.selection)->required();
    prompt->add_option("--template", pr.tpl);
    prompt->add_option("--index", pr.index, "Overrides the index path stored in the trace");
    prompt->add_option("--order", pr.order, "selection | reversed");
    prompt->add_option("-o,--output", pr.output);

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Benchmarks");
    bench->require_subcommand(1);
    auto* coverage = bench->add_subcommand("coverage", "Mean coverage against shot count");
    coverage->add_option("--index", bench_args.index)->required();
    coverage->add_option("--queries", bench_args.queries)->required();
    coverage->add_option("--strategies", bench_args.strategies);
    coverage->add_option("--shots", bench_args.shots);
    coverage->add_option("--csv", bench_args.csv);
    coverage->add_option("--svg", bench_args.svg);
    coverage->add_option("-t", bench_args.t);
    coverage->add_option("--tau", bench_args.tau);
    coverage->add_option("--seed", bench_args.seed);
    coverage->add_option("--fixed-ids", bench_args.fixed_ids);
    coverage->add_option("--embeddings", bench_args.embeddings.exemplars);
    coverage->add_option("--query-embeddings", bench_args.embeddings.queries);
    coverage->add_option("--threads", bench_args.threads);

    std::string pred_path, gold_path;
    auto* em = app.add_subcommand("em", "Exact match of a prediction against the reference");
    em->add_option("--pred", pred_path)->required();
    em->add_option("--gold", gold_path)->required();

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "Generate synthetic corpora");
    gen->add_option("kind", gen_args.kind, "minilang | trees | embeddings")->required();
    gen->add_option("--count", gen_args.count);
    gen->add_option("--seed", gen_args.seed);
    gen->add_option("--prefix", gen_args.prefix);
    gen->add_option("--max-nodes", gen_args.max_nodes);
    gen->add_option("--vocab", gen_args.vocab);
    gen->add_option("--dim", gen_args.dim);
    gen->add_option("--corpus", gen_args.corpus);
    gen->add_option("-o,--output", gen_args.output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*build) return run_index_build(build_args);
        if (*dump) {
            std::cout << dump_index_json(load_index(dump_path));
            return 0;
        }
        if (*select) return run_select(sel);
        if (*prompt) return run_prompt(pr);
        if (*coverage) return run_bench(bench_args);
        if (*em) {
            bool ok = exact_match(read_file(pred_path), read_file(gold_path));
            std::cout << (ok ? "match" : "mismatch") << '\n';
            return 0;
        }
        if (*gen) return run_gen(gen_args);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InvariantError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInput;
}
