#include "castsel/tree.hpp"

#include "castsel/errors.hpp"
#include "castsel/minilang.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

namespace castsel {

namespace {

bool is_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_label_char(char c) noexcept { return !is_space(c) && c != '(' && c != ')'; }

} // namespace

NodeType::NodeType(std::string label) : label_(std::move(label)) {
    if (!is_valid(label_)) {
        throw InputError("invalid node type label '" + label_ + "'");
    }
}

bool NodeType::is_valid(std::string_view label) noexcept {
    return !label.empty() && std::all_of(label.begin(), label.end(), is_label_char);
}

TypedTree::TypedTree(std::vector<Node> nodes, NodeId root) : nodes_(std::move(nodes)), root_(root) {
    const std::size_t n = nodes_.size();
    if (n == 0) throw InputError("tree must have at least one node");
    if (root_ >= n) throw InputError("root index out of range");

    std::vector<std::uint32_t> parents(n, 0);
    for (const Node& nd : nodes_) {
        for (NodeId c : nd.children) {
            if (c >= n) throw InputError("child index out of range");
            if (c == root_) throw InputError("root cannot be a child");
            if (++parents[c] > 1) throw InputError("node " + std::to_string(c) + " has two parents");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (i != root_ && parents[i] == 0) {
            throw InputError("node " + std::to_string(i) + " is not attached to the tree");
        }
    }

    // Iterative post-order. Every node has one parent and the root has none,
    // so a cycle would leave nodes unreachable; the count check catches it.
    postorder_.reserve(n);
    subtree_sizes_.reserve(n);
    struct Frame {
        NodeId id;
        std::size_t next_child;
        std::uint32_t first_pos;
    };
    std::vector<Frame> stack;
    stack.push_back({root_, 0, 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        const Node& nd = nodes_[f.id];
        if (f.next_child < nd.children.size()) {
            NodeId c = nd.children[f.next_child++];
            stack.push_back({c, 0, static_cast<std::uint32_t>(postorder_.size())});
            if (stack.size() > n) throw InputError("tree contains a cycle");
            continue;
        }
        postorder_.push_back(f.id);
        subtree_sizes_.push_back(static_cast<std::uint32_t>(postorder_.size()) - f.first_pos);
        stack.pop_back();
    }
    if (postorder_.size() != n) throw InputError("tree contains a cycle");
}

bool operator==(const TypedTree& a, const TypedTree& b) {
    if (a.size() != b.size()) return false;
    std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        const auto& nx = a.node(x);
        const auto& ny = b.node(y);
        if (nx.type != ny.type || nx.children.size() != ny.children.size()) return false;
        for (std::size_t i = 0; i < nx.children.size(); ++i) {
            stack.emplace_back(nx.children[i], ny.children[i]);
        }
    }
    return true;
}

NodeId TreeBuilder::add_root(std::string label) {
    if (!nodes_.empty()) throw InputError("tree already has a root");
    nodes_.push_back({NodeType(std::move(label)), {}});
    return 0;
}

NodeId TreeBuilder::add_child(NodeId parent, std::string label) {
    if (parent >= nodes_.size()) throw InputError("parent index out of range");
    auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({NodeType(std::move(label)), {}});
    nodes_[parent].children.push_back(id);
    return id;
}

TypedTree TreeBuilder::build() && { return TypedTree(std::move(nodes_), 0); }

std::size_t node_count(const TypedTree& tree) noexcept { return tree.size(); }

TypedTree parse_sexpr(std::string_view text) {
    std::vector<TypedTree::Node> nodes;
    std::vector<NodeId> open;
    std::size_t i = 0;
    const std::size_t n = text.size();
    bool done = false;

    auto skip_ws = [&] {
        while (i < n && is_space(text[i])) ++i;
    };

    skip_ws();
    while (!done) {
        if (i >= n) {
            throw ParseError(open.empty() ? "expected '('" : "unexpected end of input", i);
        }
        char c = text[i];
        if (c == '(') {
            ++i;
            std::size_t start = i;
            while (i < n && is_label_char(text[i])) ++i;
            if (i == start) throw ParseError("empty label", start);
            auto id = static_cast<NodeId>(nodes.size());
            nodes.push_back({NodeType(std::string(text.substr(start, i - start))), {}});
            if (!open.empty()) nodes[open.back()].children.push_back(id);
            open.push_back(id);
        } else if (c == ')') {
            if (open.empty()) throw ParseError("unbalanced ')'", i);
            ++i;
            open.pop_back();
            done = open.empty();
        } else {
            throw ParseError(open.empty() ? "expected '('" : "expected '(' or ')'", i);
        }
        skip_ws();
    }
    if (i != n) throw ParseError("trailing characters after tree", i);
    return TypedTree(std::move(nodes), 0);
}

std::string to_sexpr(const TypedTree& tree) {
    std::string out;
    // (node, next child); emits "(label" on entry and ")" on exit.
    std::vector<std::pair<NodeId, std::size_t>> stack{{tree.root(), 0}};
    out += '(';
    out += tree.node(tree.root()).type.label();
    while (!stack.empty()) {
        auto& [id, next] = stack.back();
        const auto& nd = tree.node(id);
        if (next < nd.children.size()) {
            NodeId c = nd.children[next++];
            out += " (";
            out += tree.node(c).type.label();
            stack.emplace_back(c, 0);
        } else {
            out += ')';
            stack.pop_back();
        }
    }
    return out;
}

std::vector<TypedTree> parse_sexpr_records(std::string_view text) {
    std::vector<TypedTree> out;
    std::size_t pos = 0;
    std::size_t record_start = 0;
    bool in_record = false;
    auto flush = [&](std::size_t end) {
        if (in_record) {
            try {
                out.push_back(parse_sexpr(text.substr(record_start, end - record_start)));
            } catch (const ParseError& e) {
                throw ParseError("record " + std::to_string(out.size()) + ": malformed tree",
                                 record_start + e.offset());
            }
        }
        in_record = false;
    };
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        bool blank = std::all_of(line.begin(), line.end(), is_space);
        if (blank) {
            flush(pos);
        } else if (!in_record) {
            in_record = true;
            record_start = pos;
        }
        pos = eol + 1;
    }
    flush(text.size());
    return out;
}

TypedTree SexprAdapter::parse(std::string_view source, std::string_view) const {
    return parse_sexpr(source);
}

void AdapterRegistry::add(std::string language, std::shared_ptr<const ParserAdapter> adapter) {
    for (auto& [lang, a] : adapters_) {
        if (lang == language) {
            a = std::move(adapter);
            return;
        }
    }
    adapters_.emplace_back(std::move(language), std::move(adapter));
}

bool AdapterRegistry::supports(std::string_view language) const noexcept {
    return std::any_of(adapters_.begin(), adapters_.end(),
                       [&](const auto& p) { return p.first == language; });
}

TypedTree AdapterRegistry::parse(std::string_view source, std::string_view language) const {
    for (const auto& [lang, a] : adapters_) {
        if (lang == language) return a->parse(source, language);
    }
    throw InputError("no parser registered for language '" + std::string(language) + "'");
}

AdapterRegistry AdapterRegistry::with_builtin_languages() {
    AdapterRegistry r;
    r.add("sexpr", std::make_shared<SexprAdapter>());
    r.add("minilang", std::make_shared<MinilangAdapter>());
    return r;
}

} // namespace castsel
