#include "loopfock/quantize.hpp"

#include <stdexcept>

namespace loopfock {

namespace {

Monomial mono_of(const std::vector<Var>& vars) {
    std::vector<std::uint16_t> codes;
    codes.reserve(vars.size());
    for (auto v : vars) codes.push_back(v.code());
    return Monomial(std::move(codes));
}

void push(std::vector<OpSummand>& out, Rational c, int hbar, std::vector<Var> mult, std::vector<Var> deriv) {
    if (is_zero(c)) return;
    out.push_back(OpSummand{std::move(c), hbar, std::move(mult), std::move(deriv)});
}

}  // namespace

QuantizedOperator QuantizedOperator::scaled(const Rational& c) const {
    QuantizedOperator out = *this;
    if (is_zero(c)) {
        out.summands.clear();
        return out;
    }
    for (auto& s : out.summands) s.coeff *= c;
    return out;
}

std::map<std::tuple<int, Monomial, Monomial>, Rational> QuantizedOperator::canonical_terms() const {
    std::map<std::tuple<int, Monomial, Monomial>, Rational> acc;
    for (const auto& s : summands) {
        auto key = std::make_tuple(s.hbar, mono_of(s.mult), mono_of(s.deriv));
        auto it = acc.find(key);
        if (it == acc.end()) {
            acc.emplace(std::move(key), s.coeff);
        } else {
            it->second += s.coeff;
            if (is_zero(it->second)) acc.erase(it);
        }
    }
    return acc;
}

QuantizedOperator weyl_quantize(const QuadHamiltonian& h, const std::vector<Rational>& unit) {
    if (static_cast<int>(unit.size()) != h.N) throw std::invalid_argument("unit vector size mismatch");
    QuantizedOperator op;
    op.N = h.N;
    op.index_bound = h.index_bound;
    auto shift_of = [&](Var v) -> Rational { return v.k == 1 ? unit[v.mu - 1] : Rational(0); };

    // pp |-> hbar d d
    for (const auto& [key, c] : h.pp)
        push(op.summands, c, +1, {}, {Var::from_code(key.first), Var::from_code(key.second)});

    // (q_B p_A)^ = q_B d_A, with q = t - shift.
    for (const auto& [key, c] : h.pq) {
        Var A = Var::from_code(key.first), B = Var::from_code(key.second);
        push(op.summands, c, 0, {B}, {A});
        Rational sB = shift_of(B);
        if (!is_zero(sB)) push(op.summands, -c * sB, 0, {}, {A});
    }

    // qq |-> q q / hbar, expanded through the dilaton shift.
    for (const auto& [key, c] : h.qq) {
        Var A = Var::from_code(key.first), B = Var::from_code(key.second);
        Rational sA = shift_of(A), sB = shift_of(B);
        push(op.summands, c, -1, {A, B}, {});
        if (!is_zero(sB)) push(op.summands, -c * sB, -1, {A}, {});
        if (!is_zero(sA)) push(op.summands, -c * sA, -1, {B}, {});
        if (!is_zero(sA) && !is_zero(sB)) push(op.summands, c * sA * sB, -1, {}, {});
    }
    return op;
}

QuantizedOperator quantize_upper_explicit(const LoopAlgebraElement& r, const std::vector<Rational>& unit,
                                          int index_bound) {
    if (!r.pure_upper()) throw std::invalid_argument("explicit quantization applies to upper elements");
    if (auto v = validate_symplectic(r)) throw std::invalid_argument("non-symplectic element: " + v->message);
    QuantizedOperator op;
    op.N = r.N;
    op.index_bound = index_bound;
    op.source = LoopAlgebraElement::Kind::upper;
    for (const auto& [l, M] : r.by_power) {
        for (int i = 0; i < r.N; ++i)
            for (int j = 0; j < r.N; ++j) {
                const Rational& c = M.at(i, j);
                if (is_zero(c)) continue;
                // sum_n (r_l)_{ij} q^j_n d_{q^i_{n+l}}, with q^j_1 = t^j_1 - unit_j.
                for (int n = 0; n + l <= index_bound; ++n) {
                    Var qj = var(j + 1, n), di = var(i + 1, n + l);
                    push(op.summands, c, 0, {qj}, {di});
                    if (n == 1 && !is_zero(unit[static_cast<std::size_t>(j)]))
                        push(op.summands, -c * unit[static_cast<std::size_t>(j)], 0, {}, {di});
                }
                // hbar/2 sum_{m=0}^{l-1} (-1)^{m+1} (r_l)_{ij} d_{q^i_{l-1-m}} d_{q^j_m}
                for (int m = 0; m <= l - 1; ++m) {
                    Rational w = c * Rational(m % 2 == 0 ? -1 : 1, 2);
                    push(op.summands, w, +1, {}, {var(i + 1, l - 1 - m), var(j + 1, m)});
                }
            }
    }
    return op;
}

QuantizedOperator element_operator(const LoopAlgebraElement& e, const std::vector<Rational>& unit,
                                   const Window& w) {
    if (auto v = validate_symplectic(e)) throw std::invalid_argument("non-symplectic element: " + v->message);
    if (e.pure_upper()) return quantize_upper_explicit(e, unit, w.K);
    QuantizedOperator op = weyl_quantize(quadratic_hamiltonian(e, w.K), unit).scaled(Rational(quantize_sign()));
    op.source = e.pure_lower() ? LoopAlgebraElement::Kind::lower : LoopAlgebraElement::Kind::general;
    return op;
}

TruncatedSeries apply_operator(const QuantizedOperator& op, const TruncatedSeries& tau) {
    TruncatedSeries out(tau.window(), tau.hbar_lo(), tau.hbar_hi());
    for (const auto& s : op.summands) {
        for (const auto& [key, c] : tau.terms()) {
            int h = key.hbar + s.hbar;
            if (!out.in_grade_range(h)) continue;
            Rational cc = c * s.coeff;
            Monomial m = key.mono;
            bool dead = false;
            for (Var v : s.deriv) {
                int mult = m.count(v);
                if (mult == 0) {
                    dead = true;
                    break;
                }
                cc *= mult;
                m = m.without(v);
            }
            if (dead) continue;
            for (Var v : s.mult) m = m.with(v);
            out.accumulate(m, cc, h);
        }
    }
    return out;
}

namespace {

// Grade ranges wide enough that the truncated exponential retains everything
// that can influence F_0..F_G on the window. Upper summands never lower the
// grade, lower summands never raise it, so one-sided discards are exact.
std::pair<int, int> exp_grade_range(const Window& w, LoopAlgebraElement::Kind kind) {
    const int depth = w.D / 3;
    const int top = tau_grade_ceiling(w);
    if (kind == LoopAlgebraElement::Kind::upper) return {-depth, std::max(w.G - 1 + depth + 1, top)};
    return {-1 - top - depth, std::max(0, top)};
}

int max_exp_orders(const Window& w) { return 2 * (w.L + w.D) + 3 * w.G + 16; }

}  // namespace

TruncatedSeries apply_exp(const QuantizedOperator& op, const TruncatedSeries& tau, ExpDirection dir) {
    if (op.source == LoopAlgebraElement::Kind::general)
        throw std::domain_error("exp of a mixed-kind operator is not supported (no grading argument)");
    auto [lo, hi] = exp_grade_range(tau.window(), op.source);
    lo = std::min(lo, tau.hbar_lo());
    hi = std::max(hi, tau.hbar_hi());
    const QuantizedOperator the_op = dir == ExpDirection::forward ? op : op.negated();
    TruncatedSeries acc = tau.with_grade_range(lo, hi);
    TruncatedSeries term = acc;
    const int guard = max_exp_orders(tau.window());
    for (int n = 1; n <= guard; ++n) {
        term = apply_operator(the_op, term).scaled(Rational(1, n));
        if (term.is_zero()) return acc;
        acc = acc + term;
    }
    throw std::runtime_error("exp did not terminate within the window guard");
}

FlowActionResult exp_action_on_potential(const QuantizedOperator& op, const Potential& p, int order_cap) {
    const Window& w = p.window;
    const int G = w.G;
    for (const auto& s : op.summands) {
        if (s.deriv.empty() && s.hbar != -1)
            throw std::logic_error("pure multiplication summand must carry grade -1");
    }

    // epsilon-expansion of F(e): slices[w][g], F = sum_w slices[w].
    std::vector<std::vector<TruncatedSeries>> slices;
    slices.push_back(p.F);
    std::vector<TruncatedSeries> total = p.F;

    const int guard = order_cap >= 0 ? order_cap : max_exp_orders(w);
    for (int order = 0; order < guard; ++order) {
        const auto& cur = slices[static_cast<std::size_t>(order)];
        std::vector<TruncatedSeries> next(static_cast<std::size_t>(G) + 1, TruncatedSeries(w));
        for (const auto& s : op.summands) {
            if (s.deriv.empty()) {
                if (order == 0) next[0].accumulate(mono_of(s.mult), s.coeff);
                continue;
            }
            if (s.deriv.size() == 1) {
                for (int g = 0; g <= G; ++g) {
                    TruncatedSeries d = cur[static_cast<std::size_t>(g)].derived(s.deriv[0]);
                    if (d.is_zero()) continue;
                    for (Var v : s.mult) d = d.times_var(v);
                    next[static_cast<std::size_t>(g)] = next[static_cast<std::size_t>(g)] + d.scaled(s.coeff);
                }
                continue;
            }
            // Second-order summand: dd F_{g-1} plus the Leibniz product part.
            for (int g = 1; g <= G; ++g) {
                TruncatedSeries dd =
                    cur[static_cast<std::size_t>(g - 1)].derived(s.deriv[0]).derived(s.deriv[1]);
                if (!dd.is_zero())
                    next[static_cast<std::size_t>(g)] =
                        next[static_cast<std::size_t>(g)] + dd.scaled(s.coeff);
            }
            for (int g = 0; g <= G; ++g) {
                for (int gp = 0; gp <= g; ++gp) {
                    for (int po = 0; po <= order; ++po) {
                        const auto& left = slices[static_cast<std::size_t>(po)][static_cast<std::size_t>(gp)];
                        const auto& right =
                            slices[static_cast<std::size_t>(order - po)][static_cast<std::size_t>(g - gp)];
                        if (left.is_zero() || right.is_zero()) continue;
                        TruncatedSeries prod = left.derived(s.deriv[0]) * right.derived(s.deriv[1]);
                        if (!prod.is_zero())
                            next[static_cast<std::size_t>(g)] =
                                next[static_cast<std::size_t>(g)] + prod.scaled(s.coeff);
                    }
                }
            }
        }
        bool all_zero = true;
        for (int g = 0; g <= G; ++g) {
            next[static_cast<std::size_t>(g)] = next[static_cast<std::size_t>(g)].scaled(Rational(1, order + 1));
            if (!next[static_cast<std::size_t>(g)].is_zero()) all_zero = false;
        }
        if (all_zero) {
            FlowActionResult res;
            res.potential = Potential(w, p.unit);
            res.potential.F = std::move(total);
            res.potential.exact = p.exact;
            res.orders_used = order;
            res.stabilized = true;
            return res;
        }
        for (int g = 0; g <= G; ++g)
            total[static_cast<std::size_t>(g)] = total[static_cast<std::size_t>(g)] + next[static_cast<std::size_t>(g)];
        slices.push_back(std::move(next));
    }
    if (order_cap < 0) throw std::runtime_error("potential flow did not stabilize within the window guard");
    FlowActionResult res;
    res.potential = Potential(w, p.unit);
    res.potential.F = std::move(total);
    res.potential.exact = p.exact;
    res.orders_used = guard;
    res.stabilized = false;
    return res;
}

Potential act_on_potential(const LoopAlgebraElement& e, const Potential& p, bool inverse) {
    if (!(e.pure_upper() || e.pure_lower()))
        throw std::domain_error("action requires a pure lower or pure upper element");
    QuantizedOperator op = element_operator(e, p.unit, p.window);
    if (inverse) op = op.negated();
    FlowActionResult res = exp_action_on_potential(op, p);
    res.potential.exact = p.exact.after_action(e.pure_upper(), res.orders_used * e.l_max());
    return res.potential;
}

namespace {

void enumerate_monomials_impl(const Window& w, std::uint16_t min_code, Monomial& acc,
                              std::vector<Monomial>& out) {
    out.push_back(acc);
    if (acc.degree() >= w.D) return;
    for (int mu = 1; mu <= w.N; ++mu)
        for (int k = 0; k <= w.K; ++k) {
            Var v = var(mu, k);
            if (v.code() < min_code) continue;
            if (acc.level_sum() + k > w.L) continue;
            Monomial next = acc.with(v);
            enumerate_monomials_impl(w, v.code(), next, out);
        }
}

}  // namespace

std::vector<Monomial> all_monomials(const Window& w) {
    std::vector<Monomial> out;
    Monomial empty;
    enumerate_monomials_impl(w, 0, empty, out);
    return out;
}

std::map<int, Rational> commutator_defect(const LoopAlgebraElement& a, const LoopAlgebraElement& b,
                                          const Window& w, const std::vector<Rational>& unit) {
    // All three operators must come from the same quantization route for the
    // defect to be meaningful; the Weyl route is used throughout. The two
    // nested applications need headroom so that no intermediate term that
    // would flow back into the test window is truncated away.
    const int lm = std::max({1, a.l_max(), b.l_max()});
    Window big(w.N, w.K + 2 * lm, w.D + 4, w.G, w.L + 4 * lm + 2);
    const int bound = big.K;
    QuantizedOperator A = weyl_quantize(quadratic_hamiltonian(a, bound), unit);
    QuantizedOperator B = weyl_quantize(quadratic_hamiltonian(b, bound), unit);
    QuantizedOperator C = weyl_quantize(quadratic_hamiltonian(lie_bracket(a, b), bound), unit);

    std::vector<Monomial> basis = all_monomials(w);

    std::map<int, Rational> central;
    bool first = true;
    const int span = 3 + tau_grade_ceiling(w);
    for (const auto& m : basis) {
        TruncatedSeries delta(big, -span, span);
        delta.accumulate(m, Rational(1), 0);
        TruncatedSeries X = apply_operator(A, apply_operator(B, delta)) -
                            apply_operator(B, apply_operator(A, delta)) - apply_operator(C, delta);
        std::map<int, Rational> lam;
        for (const auto& [key, c] : X.terms()) {
            if (!(key.mono == m))
                throw std::runtime_error("commutator defect is not central: witness monomial " + m.str() +
                                         " maps onto " + key.mono.str());
            lam[key.hbar] = c;
        }
        if (first) {
            central = lam;
            first = false;
        } else if (lam != central) {
            throw std::runtime_error("commutator defect is not central: scalar differs on witness monomial " +
                                     m.str());
        }
    }
    return central;
}

}  // namespace loopfock
