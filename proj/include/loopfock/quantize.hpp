#pragma once

#include <map>
#include <vector>

#include "loopfock/loopgrp.hpp"
#include "loopfock/potential.hpp"
#include "loopfock/series.hpp"

namespace loopfock {

// One normal-ordered summand of a quantized operator, acting on t-series as
//   coeff * hbar^{grade} * t^{mult_1} t^{mult_2} * d/dt^{deriv_1} d/dt^{deriv_2}.
// Derivatives apply first. The grades are fixed by the quantization table:
// double derivatives carry +1, multiplications without derivative -1,
// mixed first-order terms 0.
struct OpSummand {
    Rational coeff;
    int hbar = 0;
    std::vector<Var> mult;   // at most 2
    std::vector<Var> deriv;  // at most 2
};

struct QuantizedOperator {
    int N = 1;
    int index_bound = 0;  // variable levels referenced are <= index_bound
    LoopAlgebraElement::Kind source = LoopAlgebraElement::Kind::general;
    std::vector<OpSummand> summands;

    QuantizedOperator scaled(const Rational& c) const;
    QuantizedOperator negated() const { return scaled(Rational(-1)); }
    // Canonical (sorted, merged) form for term-by-term comparison.
    std::map<std::tuple<int, Monomial, Monomial>, Rational> canonical_terms() const;
};

// Weyl quantization of a quadratic hamiltonian, rewritten from q- to
// t-coordinates through the dilaton shift q^mu_1 = t^mu_1 - unit_mu.
//   pp |-> hbar d d        pq |-> q d        qq |-> q q / hbar
QuantizedOperator weyl_quantize(const QuadHamiltonian& h, const std::vector<Rational>& unit);

// Literal transcription of the displayed quantization of an upper-triangular
// element (then the same q -> t rewrite):
//   r-hat = sum_{l,n,ij} (r_l)_{ij} q^j_n d_{q^i_{n+l}}
//         + hbar/2 sum_l sum_{m=0}^{l-1} (-1)^{m+1} (r_l)_{ij} d_{q^i_{l-1-m}} d_{q^j_m}.
// Cross-check: equals quantize_sign() * weyl_quantize(quadratic_hamiltonian(r)).
QuantizedOperator quantize_upper_explicit(const LoopAlgebraElement& r, const std::vector<Rational>& unit,
                                          int index_bound);

// The global sign relating the two quantization routes; fixed once by the
// cross-check suite and hard-coded.
constexpr int quantize_sign() { return -1; }

// Convenience: the operator whose exponential implements the flow of the
// element (explicit transcription for uppers, sign-matched Weyl route
// otherwise), with derivative indices bounded by the window.
QuantizedOperator element_operator(const LoopAlgebraElement& e, const std::vector<Rational>& unit,
                                   const Window& w);

// Exact linear action, summand by summand, truncation applied throughout.
TruncatedSeries apply_operator(const QuantizedOperator& op, const TruncatedSeries& tau);

// exp(op) tau  =  sum_n op^n tau / n!  (forward), or exp(-op) tau (inverse).
// Terminates on the window for operators of a pure triangular kind; a mixed
// operator is rejected.
enum class ExpDirection { forward, inverse };
TruncatedSeries apply_exp(const QuantizedOperator& op, const TruncatedSeries& tau,
                          ExpDirection dir = ExpDirection::forward);

// exp(op) acting on a potential through the conjugated flow on log tau:
//   dF/de = [op-multiplication part] + (first-order part) F
//         + hbar-part (dd F_{g-1} + sum_{g'+g''=g} dF_{g'} dF_{g''}).
// The genus system is triangular, so this is exact on F_0..F_G with no
// genus-parameter bookkeeping. Returns the acted potential and the number of
// epsilon orders used (the nilpotency degree actually reached).
struct FlowActionResult {
    Potential potential;
    int orders_used = 0;
    bool stabilized = false;
};
// order_cap < 0 integrates until the nilpotent flow stabilizes (and throws if
// it fails to within the window guard); otherwise at most order_cap epsilon
// orders are taken.
FlowActionResult exp_action_on_potential(const QuantizedOperator& op, const Potential& p, int order_cap = -1);

// Applies exp of the quantized element to a potential, updating the exactness
// record. inverse applies exp(-op).
Potential act_on_potential(const LoopAlgebraElement& e, const Potential& p, bool inverse = false);

// [A-hat, B-hat] - ([A,B]_P)-hat applied to every in-window basis monomial;
// returns the central scalar per genus grade, or throws with a witness
// monomial if the defect is not central.
std::map<int, Rational> commutator_defect(const LoopAlgebraElement& a, const LoopAlgebraElement& b,
                                          const Window& w, const std::vector<Rational>& unit);

}  // namespace loopfock
