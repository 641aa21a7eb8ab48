#pragma once

// A small imperative language used for the shipped desk corpus, together with
// a Python-like target printer. Real deployments plug their own grammars in
// through ParserAdapter; this one exists so everything runs without external
// parsers.

#include "castsel/tree.hpp"

#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace castsel::minilang {

/// Concrete syntax node: a type label plus the lexical value for leaves
/// (identifier name, literal text, operator spelling).
struct Ast {
    std::string type;
    std::string value;
    std::vector<Ast> children;
};

/// Throws ParseError with the byte offset of the offending token.
Ast parse(std::string_view source);

/// Drops lexical values. Operators keep their spelling as the node type,
/// mirroring how grammar-generated parsers expose anonymous tokens.
TypedTree to_typed_tree(const Ast& ast);

std::string print_source(const Ast& program);
std::string print_pylite(const Ast& program);

struct GeneratorOptions {
    int max_top_level = 4;
    int max_block_statements = 3;
    int max_expr_depth = 3;
    int max_nesting = 2;
};

/// Random well-formed program. Deterministic for a given engine state.
Ast generate_program(std::mt19937_64& rng, const GeneratorOptions& options = {});

} // namespace castsel::minilang

namespace castsel {

class MinilangAdapter final : public ParserAdapter {
public:
    TypedTree parse(std::string_view source, std::string_view language) const override;
};

} // namespace castsel
