#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace castsel {

using NodeId = std::uint32_t;

/// Opaque syntactic node type, e.g. "function_definition".
/// Non-empty, no whitespace, no parentheses.
class NodeType {
public:
    explicit NodeType(std::string label);

    static bool is_valid(std::string_view label) noexcept;

    const std::string& label() const noexcept { return label_; }

    friend bool operator==(const NodeType&, const NodeType&) = default;

private:
    std::string label_;
};

/// Rooted ordered tree carrying only node types (lexical values are dropped
/// before a tree is built). Immutable once constructed.
class TypedTree {
public:
    struct Node {
        NodeType type;
        std::vector<NodeId> children;
    };

    /// Validates single-root, single-parent and acyclicity; throws InputError.
    TypedTree(std::vector<Node> nodes, NodeId root);

    std::size_t size() const noexcept { return nodes_.size(); }
    NodeId root() const noexcept { return root_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    std::span<const Node> nodes() const noexcept { return nodes_; }

    /// Node ids in post-order (children left to right, then parent).
    std::span<const NodeId> postorder() const noexcept { return postorder_; }

    /// Subtree size of the node at each post-order position. The descendants
    /// of position p occupy positions [p - size + 1, p).
    std::span<const std::uint32_t> postorder_subtree_sizes() const noexcept {
        return subtree_sizes_;
    }

    /// Structural equality: same shape, same types, same child order.
    friend bool operator==(const TypedTree& a, const TypedTree& b);

private:
    std::vector<Node> nodes_;
    NodeId root_;
    std::vector<NodeId> postorder_;
    std::vector<std::uint32_t> subtree_sizes_;
};

/// Incremental construction helper. Nodes are numbered in insertion order.
class TreeBuilder {
public:
    NodeId add_root(std::string label);
    NodeId add_child(NodeId parent, std::string label);
    TypedTree build() &&;

private:
    std::vector<TypedTree::Node> nodes_;
};

std::size_t node_count(const TypedTree& tree) noexcept;

/// Parses `tree := "(" label tree* ")"`. Nodes are numbered in pre-order.
/// Throws ParseError with the byte offset of the first offending character.
TypedTree parse_sexpr(std::string_view text);

/// Canonical form: single spaces between siblings, no trailing whitespace.
std::string to_sexpr(const TypedTree& tree);

/// Splits a tree ingestion file into records separated by blank lines and
/// parses each one.
std::vector<TypedTree> parse_sexpr_records(std::string_view text);

/// Turns source text of some language into a type-only tree.
class ParserAdapter {
public:
    virtual ~ParserAdapter() = default;
    virtual TypedTree parse(std::string_view source, std::string_view language) const = 0;
};

/// Source text is itself an S-expression.
class SexprAdapter final : public ParserAdapter {
public:
    TypedTree parse(std::string_view source, std::string_view language) const override;
};

/// Dispatches on language id.
class AdapterRegistry final : public ParserAdapter {
public:
    void add(std::string language, std::shared_ptr<const ParserAdapter> adapter);
    bool supports(std::string_view language) const noexcept;
    TypedTree parse(std::string_view source, std::string_view language) const override;

    /// Registry with "sexpr" and "minilang".
    static AdapterRegistry with_builtin_languages();

private:
    std::vector<std::pair<std::string, std::shared_ptr<const ParserAdapter>>> adapters_;
};

} // namespace castsel
