#include "loopfock/flow.hpp"

#include <stdexcept>

namespace loopfock {

namespace {

void check_upper(const LoopAlgebraElement& r) {
    if (!r.pure_upper()) throw std::invalid_argument("flow equations are transcribed for upper elements only");
    if (auto v = validate_symplectic(r)) throw std::invalid_argument("non-symplectic element: " + v->message);
}

}  // namespace

Rational flow_derivative(const Potential& p, const LoopAlgebraElement& r, const CorrelatorIndex& idx) {
    check_upper(r);
    if (idx.g < 0 || idx.g > p.window.G) throw std::out_of_range("flow index genus outside window");
    const int g = idx.g;
    const int n = static_cast<int>(idx.insertions.size());
    const Monomial full = idx.monomial();
    Rational acc(0);

    for (const auto& [l, M] : r.by_power) {
        for (int i = 1; i <= r.N; ++i) {
            for (int j = 1; j <= r.N; ++j) {
                const Rational& c = M.at(i - 1, j - 1);
                if (is_zero(c)) continue;

                // q-multiplication term at the shift point: q^j_n -> -delta_{n,1} unit_j.
                const Rational& uj = p.unit[static_cast<std::size_t>(j - 1)];
                if (!is_zero(uj) && 1 + l <= 255)
                    acc -= c * uj * correlator_or_zero(p, g, full.with(var(i, 1 + l)));

                // Insertion-raising term over hatted slots.
                for (int a = 0; a < n; ++a) {
                    Var va = idx.insertions[static_cast<std::size_t>(a)];
                    if (va.mu != j) continue;
                    if (va.k + l > 255) continue;
                    acc += c * correlator_or_zero(p, g, full.without(va).with(var(i, va.k + l)));
                }

                // Genus-lowering and genus-splitting terms.
                for (int m = 0; m <= l - 1; ++m) {
                    Rational w = c * Rational(m % 2 == 0 ? -1 : 1, 2);
                    Var vi = var(i, l - 1 - m), vj = var(j, m);
                    if (g >= 1) acc += w * correlator_or_zero(p, g - 1, full.with(vi).with(vj));
                    for (int gp = 0; gp <= g; ++gp) {
                        for (unsigned mask = 0; mask < (1u << n); ++mask) {
                            Monomial left = Monomial::single(vi), right = Monomial::single(vj);
                            for (int a = 0; a < n; ++a) {
                                Var va = idx.insertions[static_cast<std::size_t>(a)];
                                if (mask >> a & 1u)
                                    left = left.with(va);
                                else
                                    right = right.with(va);
                            }
                            Rational vl = correlator_or_zero(p, gp, left);
                            if (is_zero(vl)) continue;
                            acc += w * vl * correlator_or_zero(p, g - gp, right);
                        }
                    }
                }
            }
        }
    }
    return acc;
}

Potential integrate_flow(const Potential& p, const LoopAlgebraElement& r, int order) {
    check_upper(r);
    if (order < 0) throw std::invalid_argument("negative integration order");
    QuantizedOperator op = element_operator(r, p.unit, p.window);
    FlowActionResult res = exp_action_on_potential(op, p, order);
    res.potential.exact = p.exact.after_action(true, res.orders_used * r.l_max());
    return res.potential;
}

std::vector<FlowComparison> flow_operator_comparison(const Potential& p, const LoopAlgebraElement& r) {
    check_upper(r);
    const Window& w = p.window;

    // Operator route: grade slices of (r-hat tau) * tau^{-1}. The tau-form
    // needs headroom: one application pulls parents up to two degrees, one
    // level bump of l_max per variable and l_max + 1 of level-sum beyond the
    // extraction window. With that headroom both routes are the same exact
    // function of the stored coefficients.
    const int lm = std::max(1, r.l_max());
    Window big(w.N, w.K + lm, w.D + 2, w.G, w.L + lm + 1);
    Potential pb = embed(p, big);
    TruncatedSeries tau = potential_to_tau(pb);
    tau = tau.with_grade_range(tau.hbar_lo() - 2, tau.hbar_hi() + 2);
    Potential neg(big, p.unit);
    for (int g = 0; g <= w.G; ++g) neg.F[static_cast<std::size_t>(g)] = pb.F[static_cast<std::size_t>(g)].negated();
    TruncatedSeries tau_inv = potential_to_tau(neg).with_grade_range(tau.hbar_lo(), tau.hbar_hi());
    QuantizedOperator op = element_operator(r, p.unit, big);
    TruncatedSeries dlog = apply_operator(op, tau) * tau_inv;

    std::vector<FlowComparison> out;
    const std::vector<Monomial> basis = all_monomials(w);
    for (int g = 0; g <= w.G; ++g) {
        TruncatedSeries slice = dlog.grade_slice(g - 1);
        for (const auto& mono : basis) {
            CorrelatorIndex idx;
            idx.g = g;
            for (int i = 0; i < mono.degree(); ++i) idx.insertions.push_back(mono.at(i));
            FlowComparison cmp;
            cmp.g = g;
            cmp.mono = mono;
            cmp.flow_value = flow_derivative(p, r, idx);
            cmp.operator_value = derivative_value(slice, mono);
            out.push_back(std::move(cmp));
        }
    }
    return out;
}

}  // namespace loopfock
