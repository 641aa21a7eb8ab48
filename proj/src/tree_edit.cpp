#include "castsel/tree_edit.hpp"

#include <algorithm>
#include <vector>

namespace castsel {

namespace {

// 1-based post-order view used by the recurrence.
struct PostorderView {
    std::vector<const std::string*> label;  // label[i], i in 1..n
    std::vector<std::size_t> leftmost;      // leftmost leaf descendant of i
    std::vector<std::size_t> keyroots;      // ascending

    explicit PostorderView(const TypedTree& t) {
        const auto order = t.postorder();
        const auto sizes = t.postorder_subtree_sizes();
        const std::size_t n = order.size();
        label.resize(n + 1);
        leftmost.resize(n + 1);
        for (std::size_t p = 0; p < n; ++p) {
            label[p + 1] = &t.node(order[p]).type.label();
            leftmost[p + 1] = p + 1 - (sizes[p] - 1);
        }
        // A keyroot is the highest node sharing its leftmost leaf.
        std::vector<std::size_t> highest(n + 1, 0);
        for (std::size_t i = 1; i <= n; ++i) highest[leftmost[i]] = i;
        for (std::size_t l = 1; l <= n; ++l) {
            if (highest[l]) keyroots.push_back(highest[l]);
        }
        std::sort(keyroots.begin(), keyroots.end());
    }
};

} // namespace

std::size_t tree_edit_distance(const TypedTree& a, const TypedTree& b) {
    const PostorderView x(a);
    const PostorderView y(b);
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::size_t> td((n + 1) * (m + 1), 0);
    std::vector<std::size_t> fd((n + 2) * (m + 2), 0);
    auto TD = [&](std::size_t i, std::size_t j) -> std::size_t& { return td[i * (m + 1) + j]; };

    for (std::size_t i : x.keyroots) {
        for (std::size_t j : y.keyroots) {
            const std::size_t li = x.leftmost[i];
            const std::size_t lj = y.leftmost[j];
            // Forest distance table indexed from li-1 .. i and lj-1 .. j.
            const std::size_t cols = j - lj + 2;
            auto FD = [&](std::size_t r, std::size_t c) -> std::size_t& { return fd[(r - li + 1) * cols + (c - lj + 1)]; };
            FD(li - 1, lj - 1) = 0;
            for (std::size_t r = li; r <= i; ++r) FD(r, lj - 1) = FD(r - 1, lj - 1) + 1;
            for (std::size_t c = lj; c <= j; ++c) FD(li - 1, c) = FD(li - 1, c - 1) + 1;
            for (std::size_t r = li; r <= i; ++r) {
                for (std::size_t c = lj; c <= j; ++c) {
                    const std::size_t del = FD(r - 1, c) + 1;
                    const std::size_t ins = FD(r, c - 1) + 1;
                    if (x.leftmost[r] == li && y.leftmost[c] == lj) {
                        const std::size_t rel = FD(r - 1, c - 1) + (*x.label[r] == *y.label[c] ? 0 : 1);
                        FD(r, c) = std::min({del, ins, rel});
                        TD(r, c) = FD(r, c);
                    } else {
                        const std::size_t sub = FD(x.leftmost[r] - 1, y.leftmost[c] - 1) + TD(r, c);
                        FD(r, c) = std::min({del, ins, sub});
                    }
                }
            }
        }
    }
    return TD(n, m);
}

} // namespace castsel
