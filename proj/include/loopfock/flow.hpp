#pragma once

#include "loopfock/quantize.hpp"

namespace loopfock {

// d/de of the correlator at e = 0 under the flow of an upper-triangular
// element, transcribed term by term from the correlator flow equations:
// the q-multiplication term evaluated at the shift point q = -z 1, the
// insertion-raising sum, the genus-lowering double insertion, and the
// genus-splitting product with the free derivatives Leibniz-distributed.
// Correlators outside the stored window contribute zero, matching what the
// operator route sees on the same truncated data.
Rational flow_derivative(const Potential& p, const LoopAlgebraElement& r, const CorrelatorIndex& idx);

// Taylor integration of the flow in epsilon up to the requested order,
// evaluated at e = 1. The flow is nilpotent on the window, so a sufficiently
// high order reproduces the exponential action exactly.
Potential integrate_flow(const Potential& p, const LoopAlgebraElement& r, int order);

// The same derivative extracted through the quantized-operator route:
// grade slices of (r-hat tau) / tau. Exact equality with flow_derivative on
// every in-window index is the release gate for the quantization stack.
struct FlowComparison {
    int g = 0;
    Monomial mono;
    Rational flow_value;
    Rational operator_value;
};
std::vector<FlowComparison> flow_operator_comparison(const Potential& p, const LoopAlgebraElement& r);

}  // namespace loopfock
