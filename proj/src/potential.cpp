#include "loopfock/potential.hpp"

#include <stdexcept>

namespace loopfock {

bool ExactRegion::exact_at(int g, int degree, int level_sum, int max_level) const {
    if (knows_zero(g, degree, level_sum)) return true;
    if (g > build.G || degree > build.D || level_sum > build.L || max_level > build.K) return false;
    long w = 0;
    switch (history) {
        case History::pristine:
            return true;
        case History::upper:
            w = -dim_grade(g, degree, level_sum);
            // Each unit of weight can pull source data at most 2 degrees,
            // 2 units of level-sum and 1 per-variable level further out.
            return degree + 2 * w <= build.D && level_sum + 2 * w <= build.L && max_level + w <= build.K;
        case History::lower:
            w = dim_grade(g, degree, level_sum);
            // Lower actions pull level data downward; only the dilaton-shift
            // derivative reaches one degree up per unit of weight.
            return degree + w <= build.D;
        case History::mixed:
            w = weight_budget;
            return degree + 2 * w <= build.D && level_sum + 2 * w <= build.L && max_level + w <= build.K;
    }
    return false;
}

ExactRegion ExactRegion::after_action(bool upper, int weight_used) const {
    ExactRegion out = *this;
    out.weight_budget += weight_used;
    if (history == History::pristine)
        out.history = upper ? History::upper : History::lower;
    else if ((history == History::upper && !upper) || (history == History::lower && upper) ||
             history == History::mixed)
        out.history = History::mixed;
    return out;
}

const char* ExactRegion::history_name(History h) {
    switch (h) {
        case History::pristine: return "pristine";
        case History::upper: return "upper";
        case History::lower: return "lower";
        case History::mixed: return "mixed";
    }
    return "?";
}

Potential::Potential(const Window& w, std::vector<Rational> unit_vec) : window(w), unit(std::move(unit_vec)) {
    if (static_cast<int>(unit.size()) != w.N)
        throw std::invalid_argument("unit vector size must equal N");
    F.assign(static_cast<std::size_t>(w.G) + 1, TruncatedSeries(w));
    exact.build = w;
}

void Potential::validate_strict() const {
    if (static_cast<int>(F.size()) != window.G + 1)
        throw std::invalid_argument("potential must carry components F_0..F_G");
    for (int g = 0; g <= window.G; ++g) {
        if (!(F[g].window() == window)) throw std::invalid_argument("component window mismatch");
        for (const auto& [k, c] : F[g].terms()) {
            if (k.hbar != 0) throw std::invalid_argument("potential components must be grade-0 series");
            if (g == 0 && k.mono.degree() <= 2)
                throw std::invalid_argument("F_0 must start at degree 3; found " + k.mono.str());
            if (g >= 1 && k.mono.degree() == 0)
                throw std::invalid_argument("F_" + std::to_string(g) + " must have no constant term");
        }
    }
}

Rational correlator(const Potential& p, const CorrelatorIndex& idx) {
    if (idx.g < 0 || idx.g > p.window.G) throw std::out_of_range("correlator genus outside window");
    const int n = static_cast<int>(idx.insertions.size());
    if (n > p.window.D) throw std::out_of_range("correlator has more insertions than the degree cap");
    int lsum = 0;
    for (auto v : idx.insertions) {
        if (!p.window.contains(v))
            throw std::out_of_range("correlator insertion t[" + std::to_string(v.mu) + "," +
                                    std::to_string(int(v.k)) + "] outside window");
        lsum += v.k;
    }
    if (lsum > p.window.L) throw std::out_of_range("correlator level-sum exceeds window cap");
    return correlator_or_zero(p, idx.g, idx.monomial());
}

namespace {

Rational multiplicity_factor(const Monomial& mono) {
    Rational f(1);
    const auto& codes = mono.codes();
    std::size_t i = 0;
    while (i < codes.size()) {
        std::size_t j = i;
        while (j < codes.size() && codes[j] == codes[i]) ++j;
        f *= factorial(static_cast<unsigned>(j - i));
        i = j;
    }
    return f;
}

}  // namespace

Rational correlator_or_zero(const Potential& p, int g, const Monomial& mono) {
    if (g < 0 || g > p.window.G || !mono.inside(p.window)) return Rational(0);
    Rational c = p.F[static_cast<std::size_t>(g)].coeff(mono);
    if (is_zero(c)) return c;
    return c * multiplicity_factor(mono);
}

Rational derivative_value(const TruncatedSeries& s, const Monomial& mono, int hbar) {
    Rational c = s.coeff(mono, hbar);
    if (is_zero(c)) return c;
    return c * multiplicity_factor(mono);
}

Potential dilaton_shift(const Potential& p, ShiftDirection dir) {
    Potential out(p.window, p.unit);
    out.exact = p.exact;
    for (int g = 0; g <= p.window.G; ++g) {
        TruncatedSeries dst(p.window);
        for (const auto& [key, c] : p.F[static_cast<std::size_t>(g)].terms()) {
            // Split the monomial into level-1 variables (affected) and the rest.
            Monomial rest;
            std::vector<Var> shifted;
            for (int i = 0; i < key.mono.degree(); ++i) {
                Var v = key.mono.at(i);
                if (v.k == 1 && !is_zero(p.unit[v.mu - 1]))
                    shifted.push_back(v);
                else
                    rest = rest.with(v);
            }
            if (shifted.empty()) {
                dst.accumulate(key.mono, c);
                continue;
            }
            // Expand prod_v (x_v + s_v) with s_v = +unit (t_to_q) or -unit.
            const int m = static_cast<int>(shifted.size());
            for (unsigned mask = 0; mask < (1u << m); ++mask) {
                Monomial mono = rest;
                Rational factor = c;
                for (int i = 0; i < m; ++i) {
                    if (mask >> i & 1u) {
                        Rational s = p.unit[shifted[static_cast<std::size_t>(i)].mu - 1];
                        factor *= (dir == ShiftDirection::t_to_q) ? s : -s;
                    } else {
                        mono = mono.with(shifted[static_cast<std::size_t>(i)]);
                    }
                }
                dst.accumulate(mono, factor);
            }
        }
        out.F[static_cast<std::size_t>(g)] = std::move(dst);
    }
    return out;
}

int tau_grade_floor(const Window& w) { return -(w.D / 3); }

int tau_grade_ceiling(const Window& w) { return w.G >= 1 ? (w.G - 1) * std::max(1, w.D) : 0; }

Potential embed(const Potential& p, const Window& bigger) {
    if (bigger.N != p.window.N || bigger.G != p.window.G || bigger.K < p.window.K ||
        bigger.D < p.window.D || bigger.L < p.window.L)
        throw std::invalid_argument("embedding window must dominate the original");
    Potential out(bigger, p.unit);
    out.exact = p.exact;  // the data is still only exact relative to its build window
    for (int g = 0; g <= p.window.G; ++g) {
        TruncatedSeries s(bigger);
        for (const auto& [k, c] : p.F[static_cast<std::size_t>(g)].terms()) s.accumulate(k.mono, c, k.hbar);
        out.F[static_cast<std::size_t>(g)] = std::move(s);
    }
    return out;
}

TruncatedSeries potential_to_tau(const Potential& p) {
    p.validate_strict();
    const int lo = tau_grade_floor(p.window);
    const int hi = tau_grade_ceiling(p.window);
    TruncatedSeries log_tau(p.window, lo, hi);
    for (int g = 0; g <= p.window.G; ++g)
        for (const auto& [k, c] : p.F[static_cast<std::size_t>(g)].terms())
            log_tau.accumulate(k.mono, c, g - 1);
    return log_tau.exp();
}

Potential tau_to_potential(const TruncatedSeries& tau, const std::vector<Rational>& unit) {
    TruncatedSeries log_tau = tau.log();
    Potential p(tau.window(), unit);
    for (const auto& [k, c] : log_tau.terms()) {
        int g = k.hbar + 1;
        if (g < 0 || g > p.window.G) continue;
        p.F[static_cast<std::size_t>(g)].accumulate(k.mono, c);
    }
    return p;
}

}  // namespace loopfock
