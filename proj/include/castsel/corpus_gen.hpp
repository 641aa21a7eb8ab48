#pragma once

// Deterministic generators for the shipped corpora.

#include "castsel/corpus.hpp"
#include "castsel/embedding.hpp"
#include "castsel/tree.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace castsel {

/// Random ordered tree with up to `max_nodes` nodes over labels T0..T{vocab-1}.
TypedTree random_tree(std::mt19937_64& rng, std::size_t max_nodes, std::size_t vocab, std::size_t max_children = 4);

/// minilang -> pylite pairs with ids "<prefix>0000", "<prefix>0001", ...
std::vector<CorpusEntry> generate_minilang_corpus(std::size_t count, std::uint64_t seed, const std::string& id_prefix);

/// S-expression trees (source_lang "sexpr") with their mirror image as target.
std::vector<CorpusEntry> generate_tree_corpus(std::size_t count, std::uint64_t seed, std::size_t max_nodes,
                                              std::size_t vocab);

/// Stand-in for neural code embeddings: L2-normalized histogram of node
/// types and bigrams of parent/child types, hashed into `dim` buckets.
EmbeddingTable node_type_embeddings(const std::vector<CorpusEntry>& entries, std::size_t dim,
                                    const ParserAdapter& adapter);

} // namespace castsel
