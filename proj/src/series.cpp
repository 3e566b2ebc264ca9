#include "loopfock/series.hpp"

#include <sstream>

namespace loopfock {

TruncatedSeries TruncatedSeries::constant(const Window& w, const Rational& c, int hbar_lo, int hbar_hi) {
    TruncatedSeries s(w, hbar_lo, hbar_hi);
    s.accumulate(Monomial::one(), c, 0);
    return s;
}

void TruncatedSeries::accumulate(const Monomial& m, const Rational& c, int hbar) {
    if (loopfock::is_zero(c)) return;
    if (!in_grade_range(hbar) || !m.inside(window_)) return;
    Key key{hbar, m};
    auto it = terms_.find(key);
    if (it == terms_.end()) {
        terms_.emplace(std::move(key), c);
    } else {
        it->second += c;
        if (loopfock::is_zero(it->second)) terms_.erase(it);
    }
}

TruncatedSeries TruncatedSeries::with_grade_range(int lo, int hi) const {
    TruncatedSeries out(window_, lo, hi);
    for (const auto& [k, c] : terms_) out.accumulate(k.mono, c, k.hbar);
    return out;
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    if (!(window_ == o.window_)) throw std::invalid_argument("window mismatch in series addition");
    TruncatedSeries out(window_, std::min(hbar_lo_, o.hbar_lo_), std::max(hbar_hi_, o.hbar_hi_));
    out.terms_ = terms_;
    for (const auto& [k, c] : o.terms_) out.accumulate(k.mono, c, k.hbar);
    return out;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const {
    if (!(window_ == o.window_)) throw std::invalid_argument("window mismatch in series subtraction");
    TruncatedSeries out(window_, std::min(hbar_lo_, o.hbar_lo_), std::max(hbar_hi_, o.hbar_hi_));
    out.terms_ = terms_;
    for (const auto& [k, c] : o.terms_) out.accumulate(k.mono, -c, k.hbar);
    return out;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    if (!(window_ == o.window_)) throw std::invalid_argument("window mismatch in series product");
    TruncatedSeries out(window_, std::min(hbar_lo_, o.hbar_lo_), std::max(hbar_hi_, o.hbar_hi_));
    const int D = window_.D, L = window_.L;
    for (const auto& [ka, ca] : terms_) {
        const int da = ka.mono.degree(), la = ka.mono.level_sum();
        for (const auto& [kb, cb] : o.terms_) {
            if (da + kb.mono.degree() > D) continue;
            if (la + kb.mono.level_sum() > L) continue;
            const int h = ka.hbar + kb.hbar;
            if (!out.in_grade_range(h)) continue;
            out.accumulate(ka.mono.merged(kb.mono), ca * cb, h);
        }
    }
    return out;
}

TruncatedSeries TruncatedSeries::scaled(const Rational& c) const {
    TruncatedSeries out(window_, hbar_lo_, hbar_hi_);
    if (loopfock::is_zero(c)) return out;
    for (const auto& [k, v] : terms_) out.terms_.emplace(k, v * c);
    return out;
}

TruncatedSeries TruncatedSeries::derived(Var v) const {
    if (!window_.contains(v)) throw std::out_of_range("derivative variable outside window");
    TruncatedSeries out(window_, hbar_lo_, hbar_hi_);
    for (const auto& [k, c] : terms_) {
        int mult = k.mono.count(v);
        if (mult == 0) continue;
        out.accumulate(k.mono.without(v), c * mult, k.hbar);
    }
    return out;
}

TruncatedSeries TruncatedSeries::times_var(Var v) const {
    TruncatedSeries out(window_, hbar_lo_, hbar_hi_);
    for (const auto& [k, c] : terms_) out.accumulate(k.mono.with(v), c, k.hbar);
    return out;
}

TruncatedSeries TruncatedSeries::hbar_shifted(int delta) const {
    TruncatedSeries out(window_, hbar_lo_, hbar_hi_);
    for (const auto& [k, c] : terms_) out.accumulate(k.mono, c, k.hbar + delta);
    return out;
}

TruncatedSeries TruncatedSeries::grade_slice(int hbar) const {
    TruncatedSeries out(window_, 0, 0);
    for (const auto& [k, c] : terms_)
        if (k.hbar == hbar) out.accumulate(k.mono, c, 0);
    return out;
}

TruncatedSeries TruncatedSeries::exp() const {
    for (const auto& [k, c] : terms_) {
        if (k.mono.degree() == 0)
            throw std::domain_error("exp requires zero constant term; offending grade " +
                                    std::to_string(k.hbar) + " coefficient " + rat_to_string(c));
    }
    TruncatedSeries out = constant(window_, Rational(1), hbar_lo_, hbar_hi_);
    TruncatedSeries power = out;
    Rational inv_fact(1);
    // Every term has degree >= 1, so the sum stops after D factors.
    for (int n = 1; n <= window_.D; ++n) {
        power = power * (*this);
        if (power.is_zero()) break;
        inv_fact /= n;
        for (const auto& [k, c] : power.terms_) out.accumulate(k.mono, c * inv_fact, k.hbar);
    }
    return out;
}

TruncatedSeries TruncatedSeries::log() const {
    {
        auto unit = coeff(Monomial::one(), 0);
        if (unit != Rational(1))
            throw std::domain_error("log requires constant term 1 at genus-parameter power 0, found " +
                                    rat_to_string(unit));
    }
    TruncatedSeries x(window_, hbar_lo_, hbar_hi_);
    for (const auto& [k, c] : terms_) {
        if (k.mono.degree() == 0 && k.hbar == 0) continue;
        x.terms_.emplace(k, c);
    }
    // x is nilpotent: positive-degree parts die by degree truncation and
    // degree-0 parts at nonzero grade die by the grade range.
    const int max_iter = window_.D + (hbar_hi_ - hbar_lo_) + 2;
    TruncatedSeries out(window_, hbar_lo_, hbar_hi_);
    TruncatedSeries power = x;
    for (int n = 1; n <= max_iter; ++n) {
        if (power.is_zero()) return out;
        Rational c = Rational((n % 2) ? 1 : -1, n);
        for (const auto& [k, v] : power.terms_) out.accumulate(k.mono, v * c, k.hbar);
        power = power * x;
    }
    if (!power.is_zero())
        throw std::domain_error("log did not terminate: constant terms at opposing genus grades");
    return out;
}

std::string TruncatedSeries::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << rat_to_string(c) << ")";
        if (k.hbar != 0) os << "*h^" << k.hbar;
        if (!k.mono.empty()) os << "*" << k.mono.str();
    }
    return os.str();
}

TruncatedSeries series_arith(const TruncatedSeries& a, const TruncatedSeries& b, const std::string& op) {
    if (op == "add") return a + b;
    if (op == "mul") return a * b;
    throw std::invalid_argument("unknown series operation '" + op + "'");
}

}  // namespace loopfock
