#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loopfock/flow.hpp"
#include "loopfock/quantize.hpp"
#include "loopfock/vertex.hpp"

using namespace loopfock;

namespace {

RatMatrix scalar(const Rational& c) {
    RatMatrix m(1);
    m.at(0, 0) = c;
    return m;
}

}  // namespace

TEST_CASE("weyl quantization of the 1/z hamiltonian, term for term") {
    auto s = LoopAlgebraElement::lower(1, {scalar(rat(1))});
    QuadHamiltonian h = quadratic_hamiltonian(s, 4);
    QuantizedOperator op = weyl_quantize(h, {rat(1)});
    auto terms = op.canonical_terms();
    // -q_0^2/(2 hbar)
    Monomial q00 = Monomial::single(var(1, 0)).with(var(1, 0));
    CHECK(terms.at({-1, q00, Monomial::one()}) == rat(-1, 2));
    // -q_{m+1} d_{q_m}, with q_1 = t_1 - 1 splitting off +d_{q_0}
    CHECK(terms.at({0, Monomial::single(var(1, 1)), Monomial::single(var(1, 0))}) == rat(-1));
    CHECK(terms.at({0, Monomial::one(), Monomial::single(var(1, 0))}) == rat(1));
    CHECK(terms.at({0, Monomial::single(var(1, 2)), Monomial::single(var(1, 1))}) == rat(-1));
    // quantize zero hamiltonian -> zero operator
    CHECK(weyl_quantize(quadratic_hamiltonian(LoopAlgebraElement::upper(1, {}), 4), {rat(1)})
              .canonical_terms()
              .empty());
}

TEST_CASE("explicit upper quantization: N=1, r_1 = c") {
    Rational c = rat(2, 5);
    auto r = LoopAlgebraElement::upper(1, {scalar(c)});
    QuantizedOperator op = quantize_upper_explicit(r, {rat(1)}, 4);
    auto terms = op.canonical_terms();
    // first part: c sum_n q_n d_{q_{n+1}} (with the n=1 dilaton split)
    CHECK(terms.at({0, Monomial::single(var(1, 0)), Monomial::single(var(1, 1))}) == c);
    CHECK(terms.at({0, Monomial::single(var(1, 1)), Monomial::single(var(1, 2))}) == c);
    CHECK(terms.at({0, Monomial::one(), Monomial::single(var(1, 2))}) == -c);
    // second part: (hbar/2)(-1) c d_{q_0} d_{q_0}
    Monomial dd = Monomial::single(var(1, 0)).with(var(1, 0));
    CHECK(terms.at({1, Monomial::one(), dd}) == -c / 2);
    // r = 0 -> 0
    CHECK(quantize_upper_explicit(LoopAlgebraElement::upper(1, {}), {rat(1)}, 4).canonical_terms().empty());
}

TEST_CASE("explicit transcription equals sign * weyl route on random uppers") {
    for (int i = 0; i < 10; ++i) {
        int N = 1 + i % 3;
        auto r = random_symplectic_element(500 + static_cast<std::uint64_t>(i), N, 1 + i % 2, true);
        std::vector<Rational> unit(static_cast<std::size_t>(N), rat(1));
        const int bound = 6;
        QuantizedOperator lhs = quantize_upper_explicit(r, unit, bound);
        QuantizedOperator rhs =
            weyl_quantize(quadratic_hamiltonian(r, bound), unit).scaled(Rational(quantize_sign()));
        CHECK(lhs.canonical_terms() == rhs.canonical_terms());
    }
}

TEST_CASE("apply_operator basics") {
    Window w(1, 3, 4, 1, 6);
    TruncatedSeries tau(w, -2, 2);
    Var t0 = var(1, 0);
    tau.accumulate(Monomial::single(t0).with(t0), rat(1));

    QuantizedOperator op;
    op.N = 1;
    op.summands.push_back(OpSummand{rat(1), 0, {t0}, {t0}});  // t d/dt
    TruncatedSeries out = apply_operator(op, tau);
    CHECK(out.coeff(Monomial::single(t0).with(t0)) == rat(2));

    QuantizedOperator dd;
    dd.N = 1;
    dd.summands.push_back(OpSummand{rat(1), 1, {}, {t0, t0}});
    TruncatedSeries lin(w, -2, 2);
    lin.accumulate(Monomial::single(t0), rat(5));
    CHECK(apply_operator(dd, lin).is_zero());
    CHECK(apply_operator(dd, tau).coeff(Monomial::one(), 1) == rat(2));
}

TEST_CASE("upper summands strictly lower level-sum plus degree") {
    auto r = random_symplectic_element(42, 2, 2, true);
    std::vector<Rational> unit = {rat(1), rat(1)};
    Window w(2, 4, 4, 1, 7);
    QuantizedOperator op = element_operator(r, unit, w);
    for (const auto& s : op.summands) {
        int dq = static_cast<int>(s.mult.size()) - static_cast<int>(s.deriv.size());
        int dl = 0;
        for (auto v : s.mult) dl += v.k;
        for (auto v : s.deriv) dl -= v.k;
        CHECK(dq + dl < 0);
    }
}

TEST_CASE("exp then inverse exp is the identity on the vertex tau") {
    Window w(1, 6, 4, 1, 6);
    Potential p = point_potential(w);
    TruncatedSeries tau = potential_to_tau(p);
    auto r = random_symplectic_element(77, 1, 2, true);
    QuantizedOperator op = element_operator(r, p.unit, w);
    TruncatedSeries forward = apply_exp(op, tau);
    TruncatedSeries back = apply_exp(op, forward, ExpDirection::inverse);
    CHECK(back.with_grade_range(tau.hbar_lo(), tau.hbar_hi()) == tau);
    // exp(0) tau = tau
    QuantizedOperator zero;
    zero.N = 1;
    zero.source = LoopAlgebraElement::Kind::upper;
    CHECK(apply_exp(zero, tau) == tau);
}

TEST_CASE("exp of a mixed operator is rejected") {
    Window w(1, 2, 2, 0, 2);
    LoopAlgebraElement mixed;
    mixed.N = 1;
    mixed.kind = LoopAlgebraElement::Kind::general;
    mixed.by_power.emplace(1, scalar(rat(1)));
    mixed.by_power.emplace(-1, scalar(rat(1)));
    QuantizedOperator op = element_operator(mixed, {rat(1)}, w);
    TruncatedSeries tau = TruncatedSeries::constant(w, rat(1), -1, 1);
    CHECK_THROWS_AS(apply_exp(op, tau), std::domain_error);
}

namespace {

// The two exponential routes are distinct truncation schemes of the same
// exact action; they must agree wherever the exactness model certifies that
// no pull left the window. Returns the number of certified coefficients
// compared so callers can assert the comparison was not vacuous.
long compare_routes_on_certified(const Potential& p, const LoopAlgebraElement& e) {
    Potential via_flow = act_on_potential(e, p);
    QuantizedOperator op = element_operator(e, p.unit, p.window);
    Potential via_tau = tau_to_potential(apply_exp(op, potential_to_tau(p)), p.unit);
    const ExactRegion& region = via_flow.exact;
    long compared = 0;
    for (int g = 0; g <= p.window.G; ++g) {
        std::map<Monomial, bool> support;
        for (const auto& [k, c] : via_flow.F[static_cast<std::size_t>(g)].terms()) support.emplace(k.mono, true);
        for (const auto& [k, c] : via_tau.F[static_cast<std::size_t>(g)].terms()) support.emplace(k.mono, true);
        for (const auto& [m, _] : support) {
            if (!region.exact_at(g, m.degree(), m.level_sum(), m.max_level())) continue;
            CHECK(via_flow.F[static_cast<std::size_t>(g)].coeff(m) ==
                  via_tau.F[static_cast<std::size_t>(g)].coeff(m));
            ++compared;
        }
    }
    return compared;
}

}  // namespace

TEST_CASE("potential flow action matches the tau-form exponential (upper)") {
    Window w(1, 6, 5, 2, 6);
    Potential p = point_potential(w);
    long compared = 0;
    for (int i = 0; i < 4; ++i) {
        auto r = random_symplectic_element(900 + static_cast<std::uint64_t>(i), 1, 2, true);
        compared += compare_routes_on_certified(p, r);
    }
    CHECK(compared > 50);
}

TEST_CASE("potential flow action matches the tau-form exponential (lower)") {
    Window w(1, 5, 5, 2, 6);
    Potential p = point_potential(w);
    long compared = 0;
    for (int i = 0; i < 4; ++i) {
        auto s = random_symplectic_element(950 + static_cast<std::uint64_t>(i), 1, 2, false);
        compared += compare_routes_on_certified(p, s);
    }
    CHECK(compared > 50);
}

TEST_CASE("act then inverse act restores the potential exactly") {
    Window w(2, 5, 4, 1, 6);
    Potential p = product_vertex(w);
    for (int i = 0; i < 3; ++i) {
        auto e = random_symplectic_element(1100 + static_cast<std::uint64_t>(i), 2, 2, i % 2 == 0);
        Potential q = act_on_potential(e, p);
        Potential back = act_on_potential(e, q, true);
        CHECK(back == p);
    }
}

TEST_CASE("commutator defect vanishes for commuting pairs") {
    Window w(1, 3, 3, 1, 4);
    auto a = LoopAlgebraElement::upper(1, {scalar(rat(1, 2))});
    auto b = LoopAlgebraElement::upper(1, {scalar(rat(0)), RatMatrix(1)});
    // a = b case
    auto same = commutator_defect(a, a, w, {rat(1)});
    for (const auto& [g, c] : same) CHECK(is_zero(c));
    // N=1 uppers commute
    auto c1 = LoopAlgebraElement::upper(1, {scalar(rat(3, 7))});
    auto d1 = LoopAlgebraElement::upper(1, {scalar(rat(0)), scalar(rat(0)), scalar(rat(2))});
    auto defect = commutator_defect(c1, d1, w, {rat(1)});
    for (const auto& [g, c] : defect) CHECK(is_zero(c));
}

TEST_CASE("commutator defect is central for random pairs") {
    Window w(2, 3, 3, 1, 4);
    std::vector<Rational> unit = {rat(1), rat(1)};
    for (int i = 0; i < 6; ++i) {
        auto a = random_symplectic_element(1300 + static_cast<std::uint64_t>(i), 2, 2, i % 2 == 0);
        auto b = random_symplectic_element(1400 + static_cast<std::uint64_t>(i), 2, 2, i % 3 != 0);
        CHECK_NOTHROW(commutator_defect(a, b, w, unit));
    }
}

TEST_CASE("mixed commutator produces a nonzero central scalar") {
    Window w(1, 3, 4, 1, 4);
    auto up = LoopAlgebraElement::upper(1, {scalar(rat(1))});
    auto low = LoopAlgebraElement::lower(1, {scalar(rat(1))});
    auto defect = commutator_defect(up, low, w, {rat(1)});
    bool nonzero = false;
    for (const auto& [g, c] : defect)
        if (!is_zero(c)) nonzero = true;
    CHECK(nonzero);
}

TEST_CASE("flow derivative equals the operator route on all in-window indices") {
    Window w(1, 5, 4, 2, 5);
    Potential p = point_potential(w);
    for (int i = 0; i < 3; ++i) {
        auto r = random_symplectic_element(2000 + static_cast<std::uint64_t>(i), 1, 2, true);
        auto rows = flow_operator_comparison(p, r);
        for (const auto& row : rows) CHECK(row.flow_value == row.operator_value);
    }
}

TEST_CASE("flow derivative equals the operator route for N=2") {
    Window w(2, 4, 4, 2, 4);
    Potential p = product_vertex(w);
    auto r = random_symplectic_element(2100, 2, 2, true);
    auto rows = flow_operator_comparison(p, r);
    long checked = 0;
    for (const auto& row : rows) {
        CHECK(row.flow_value == row.operator_value);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("flow of r = 0 vanishes and integrate_flow basics") {
    Window w(1, 4, 4, 1, 5);
    Potential p = point_potential(w);
    auto zero = LoopAlgebraElement::upper(1, {});
    CHECK(flow_derivative(p, zero, {0, {var(1, 0), var(1, 0), var(1, 0)}}) == rat(0));
    auto r = random_symplectic_element(2200, 1, 2, true);
    // order 0 -> unchanged
    CHECK(integrate_flow(p, r, 0) == p);
    // first order linear in the element
    Potential first = integrate_flow(p, r, 1);
    LoopAlgebraElement r2 = r;
    for (auto& [pw, M] : r2.by_power)
        for (auto& x : M.a) x *= 3;
    Potential first2 = integrate_flow(p, r2, 1);
    for (int g = 0; g <= w.G; ++g) {
        TruncatedSeries d1 = first.F[static_cast<std::size_t>(g)] - p.F[static_cast<std::size_t>(g)];
        TruncatedSeries d2 = first2.F[static_cast<std::size_t>(g)] - p.F[static_cast<std::size_t>(g)];
        CHECK(d2 == d1.scaled(rat(3)));
    }
    // high order reproduces the exponential action
    QuantizedOperator op = element_operator(r, p.unit, w);
    Potential full = exp_action_on_potential(op, p).potential;
    Potential integ = integrate_flow(p, r, w.L + w.D + 8);
    for (int g = 0; g <= w.G; ++g)
        CHECK(integ.F[static_cast<std::size_t>(g)] == full.F[static_cast<std::size_t>(g)]);
}

TEST_CASE("epsilon stabilization within the level bound") {
    Window w(1, 6, 4, 2, 6);
    Potential p = point_potential(w);
    auto r = random_symplectic_element(2300, 1, 2, true);
    QuantizedOperator op = element_operator(r, p.unit, w);
    FlowActionResult res = exp_action_on_potential(op, p);
    CHECK(res.stabilized);
    CHECK(res.orders_used <= w.L + 1);
}
