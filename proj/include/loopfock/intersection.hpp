#pragma once

#include <vector>

#include "loopfock/rational.hpp"

namespace loopfock {

// Index of a psi-class intersection number: genus g and the multiset of
// descendent levels (k_1,...,k_n). Nonzero values require the dimension
// constraint sum k_i = 3g - 3 + n.
struct IntersectionKey {
    int g = 0;
    std::vector<int> levels;  // kept sorted
};

// Exact <tau_{k_1}...tau_{k_n}>_g for stable (g,n), computed by the
// Virasoro-constraint recursion seeded at <tau_0^3>_0 = 1 (the L_0 central
// term produces <tau_1>_1 = 1/24). Memoized; safe for concurrent callers.
// Throws for unstable input (2g - 2 + n <= 0).
Rational intersection_number(const IntersectionKey& key);

// Stability predicate 2g - 2 + n > 0.
bool stable(int g, int n);

// Clears the memo table (test hook).
void intersection_cache_clear();

}  // namespace loopfock
