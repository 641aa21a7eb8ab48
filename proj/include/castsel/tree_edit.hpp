#pragma once

#include "castsel/tree.hpp"

#include <cstddef>

namespace castsel {

/// Ordered tree edit distance (Zhang-Shasha) with unit insert, delete and
/// relabel costs; relabeling between equal types is free.
std::size_t tree_edit_distance(const TypedTree& a, const TypedTree& b);

} // namespace castsel
