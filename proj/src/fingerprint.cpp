#include "castsel/fingerprint.hpp"

#include "castsel/errors.hpp"
#include "castsel/hash.hpp"

#include <algorithm>

namespace castsel {

bool FingerprintProfile::contains(Fingerprint fp) const noexcept {
    return std::binary_search(set.begin(), set.end(), fp);
}

Fingerprint fingerprint_node_type(const NodeType& type) noexcept { return hash_bytes(type.label()); }

FingerprintProfile fingerprint_tree(const TypedTree& tree, std::size_t* visits) {
    const auto order = tree.postorder();
    const auto sizes = tree.postorder_subtree_sizes();
    std::vector<Fingerprint> per_node(order.size());
    // Children of the node at position p sit at p-1, p-1-size(p-1), ...
    // walking right to left; collect them and fold left to right.
    std::vector<std::uint32_t> child_pos;
    for (std::size_t p = 0; p < order.size(); ++p) {
        if (visits) ++*visits;
        const auto& nd = tree.node(order[p]);
        child_pos.clear();
        std::size_t q = p;
        for (std::size_t i = 0; i < nd.children.size(); ++i) {
            q -= 1;
            child_pos.push_back(static_cast<std::uint32_t>(q));
            q -= sizes[q] - 1;
        }
        Fingerprint fp = 0;
        for (auto it = child_pos.rbegin(); it != child_pos.rend(); ++it) {
            fp = hash_u64(fp + per_node[*it]);
        }
        per_node[p] = hash_u64(fp + fingerprint_node_type(nd.type));
    }
    return profile_from_per_node(std::move(per_node));
}

FingerprintProfile profile_from_per_node(std::vector<Fingerprint> per_node) {
    if (per_node.empty()) throw InputError("fingerprint profile must cover at least one node");
    FingerprintProfile prof;
    prof.set = per_node;
    std::sort(prof.set.begin(), prof.set.end());
    prof.set.erase(std::unique(prof.set.begin(), prof.set.end()), prof.set.end());
    prof.per_node = std::move(per_node);
    return prof;
}

std::size_t subtree_multiset_size(const FingerprintProfile& profile) noexcept { return profile.per_node.size(); }

} // namespace castsel
