#include "castsel/corpus_gen.hpp"

#include "castsel/hash.hpp"
#include "castsel/index.hpp"
#include "castsel/minilang.hpp"
#include "castsel/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace castsel {

TypedTree random_tree(std::mt19937_64& rng, std::size_t max_nodes, std::size_t vocab, std::size_t max_children) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform_below(rng, max_nodes));
    auto label = [&] { return "T" + std::to_string(uniform_below(rng, vocab)); };
    TreeBuilder b;
    std::vector<NodeId> open{b.add_root(label())};
    std::vector<std::size_t> kids{0};
    // Attach each new node to a random node that still has room; appending
    // keeps sibling order equal to creation order.
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t slot;
        do {
            slot = static_cast<std::size_t>(uniform_below(rng, open.size()));
        } while (kids[slot] >= max_children);
        NodeId id = b.add_child(open[slot], label());
        ++kids[slot];
        open.push_back(id);
        kids.push_back(0);
    }
    return std::move(b).build();
}

std::vector<CorpusEntry> generate_minilang_corpus(std::size_t count, std::uint64_t seed, const std::string& id_prefix) {
    std::mt19937_64 rng(seed);
    std::vector<CorpusEntry> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        minilang::Ast prog = minilang::generate_program(rng);
        char id[32];
        std::snprintf(id, sizeof id, "%04zu", i);
        out.push_back(CorpusEntry{id_prefix + id, "minilang", "pylite", minilang::print_source(prog),
                                  minilang::print_pylite(prog), std::nullopt});
    }
    return out;
}

namespace {

TypedTree mirror(const TypedTree& t) {
    std::vector<TypedTree::Node> nodes(t.nodes().begin(), t.nodes().end());
    for (auto& nd : nodes) std::reverse(nd.children.begin(), nd.children.end());
    return TypedTree(std::move(nodes), t.root());
}

} // namespace

std::vector<CorpusEntry> generate_tree_corpus(std::size_t count, std::uint64_t seed, std::size_t max_nodes,
                                              std::size_t vocab) {
    std::mt19937_64 rng(seed);
    std::vector<CorpusEntry> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        TypedTree t = random_tree(rng, max_nodes, vocab);
        char id[32];
        std::snprintf(id, sizeof id, "tree%04zu", i);
        out.push_back(CorpusEntry{id, "sexpr", "sexpr", to_sexpr(t), to_sexpr(mirror(t)), std::nullopt});
    }
    return out;
}

EmbeddingTable node_type_embeddings(const std::vector<CorpusEntry>& entries, std::size_t dim,
                                    const ParserAdapter& adapter) {
    EmbeddingTable table(dim);
    for (const auto& e : entries) {
        TypedTree t = parse_entry_tree(e, adapter);
        std::vector<double> v(dim, 0.0);
        for (const auto& nd : t.nodes()) {
            v[hash_bytes(nd.type.label()) % dim] += 1.0;
            for (NodeId c : nd.children) {
                v[hash_bytes(nd.type.label() + ">" + t.node(c).type.label()) % dim] += 0.5;
            }
        }
        double norm = 0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        // Six significant digits keep the text file compact and exact on reload.
        for (double& x : v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", x / norm);
            x = std::strtod(buf, nullptr);
        }
        table.add(e.id, std::move(v));
    }
    return table;
}

} // namespace castsel
