#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "loopfock/rational.hpp"
#include "loopfock/window.hpp"

namespace loopfock {

// Sparse exact formal series in the variables t^mu_k, truncated to a window,
// with an integer grade per term tracking the power of the genus parameter.
// Plain t-series are the special case where every term has grade 0.
//
// Stored invariants: no zero coefficients, every monomial inside the window,
// every grade inside [hbar_lo, hbar_hi]. Values are immutable in spirit: all
// operations return fresh series.
class TruncatedSeries {
  public:
    struct Key {
        int hbar = 0;
        Monomial mono;
        friend bool operator<(const Key& a, const Key& b) {
            if (a.hbar != b.hbar) return a.hbar < b.hbar;
            if (a.mono.degree() != b.mono.degree()) return a.mono.degree() < b.mono.degree();
            return a.mono.codes() < b.mono.codes();
        }
        friend bool operator==(const Key& a, const Key& b) { return a.hbar == b.hbar && a.mono == b.mono; }
    };
    using TermMap = std::map<Key, Rational>;

    TruncatedSeries() = default;
    explicit TruncatedSeries(const Window& w, int hbar_lo = 0, int hbar_hi = 0)
        : window_(w), hbar_lo_(hbar_lo), hbar_hi_(hbar_hi) {
        if (hbar_lo_ > hbar_hi_) throw std::invalid_argument("empty genus-grade range");
    }

    static TruncatedSeries constant(const Window& w, const Rational& c, int hbar_lo = 0, int hbar_hi = 0);

    const Window& window() const { return window_; }
    int hbar_lo() const { return hbar_lo_; }
    int hbar_hi() const { return hbar_hi_; }
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    Rational coeff(const Monomial& m, int hbar = 0) const {
        auto it = terms_.find(Key{hbar, m});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    // Accumulates c into the coefficient of (m, hbar), dropping anything
    // outside the window. The workhorse for every construction below.
    void accumulate(const Monomial& m, const Rational& c, int hbar = 0);

    bool in_grade_range(int hbar) const { return hbar >= hbar_lo_ && hbar <= hbar_hi_; }

    // Returns a copy with the same window but the given grade range
    // (terms outside the new range are dropped).
    TruncatedSeries with_grade_range(int lo, int hi) const;

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries scaled(const Rational& c) const;
    TruncatedSeries negated() const { return scaled(Rational(-1)); }

    // Formal partial derivative by t^var.
    TruncatedSeries derived(Var v) const;
    // Multiplication by the single variable t^var (windowed).
    TruncatedSeries times_var(Var v) const;
    // Multiplies every term's grade by shifting it (drops what leaves the range).
    TruncatedSeries hbar_shifted(int delta) const;
    // Grade-g slice as a plain (grade-0) series.
    TruncatedSeries grade_slice(int hbar) const;

    // exp/log within the window. exp requires no degree-0 terms; log
    // requires the degree-0 grade-0 coefficient to be exactly 1 and is
    // the two-sided inverse of exp on their domains.
    TruncatedSeries exp() const;
    TruncatedSeries log() const;

    bool operator==(const TruncatedSeries& o) const {
        return window_ == o.window_ && terms_ == o.terms_;
    }

    std::string str() const;

  private:
    Window window_;
    int hbar_lo_ = 0;
    int hbar_hi_ = 0;
    TermMap terms_;
};

// op must be one of "add", "mul"; "scale" is covered by scaled().
TruncatedSeries series_arith(const TruncatedSeries& a, const TruncatedSeries& b, const std::string& op);

}  // namespace loopfock
