#pragma once

#include "castsel/tree.hpp"

#include <cstdint>
#include <vector>

namespace castsel {

/// Identifier of a rooted subtree (structure + node types).
using Fingerprint = std::uint64_t;

/// Fingerprints of every rooted subtree of one tree.
struct FingerprintProfile {
    /// One entry per node, in post-order. The last entry is the root.
    std::vector<Fingerprint> per_node;
    /// Sorted, deduplicated per_node values.
    std::vector<Fingerprint> set;

    bool contains(Fingerprint fp) const noexcept;
    Fingerprint root() const { return per_node.back(); }

    friend bool operator==(const FingerprintProfile&, const FingerprintProfile&) = default;
};

Fingerprint fingerprint_node_type(const NodeType& type) noexcept;

/// One post-order pass. For a node r:
///   fp = 0; for each child c: fp = H(fp + fp(c)); fp = H(fp + H(type(r)))
/// with wrapping 64-bit addition. `visits`, when given, is incremented once
/// per node processed.
FingerprintProfile fingerprint_tree(const TypedTree& tree, std::size_t* visits = nullptr);

/// Builds a profile from stored per-node values (used when loading indexes).
FingerprintProfile profile_from_per_node(std::vector<Fingerprint> per_node);

/// Size of the subtree multiset, i.e. the node count.
std::size_t subtree_multiset_size(const FingerprintProfile& profile) noexcept;

} // namespace castsel
