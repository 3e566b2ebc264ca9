#pragma once

#include "loopfock/intersection.hpp"
#include "loopfock/potential.hpp"

namespace loopfock {

// The point potential: every in-window monomial of F_g carries the
// corresponding intersection number with its symmetry factor. Requires N = 1.
Potential point_potential(const Window& w);

// The N-fold product vertex: F_g(t) = sum_mu F_g^pt(t^mu), unit = (1,...,1).
// No cross-direction terms appear.
Potential product_vertex(const Window& w);

}  // namespace loopfock
