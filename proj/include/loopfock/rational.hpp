#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace loopfock {

// Exact rational numbers. All coefficient arithmetic in this project is
// exact; there is no floating-point mode anywhere. GMP keeps values in
// canonical form (reduced, positive denominator) through arithmetic.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parses "p", "p/q" or "-p/q" with decimal integers. mpq_class's string
// constructor does not reduce, so canonicalize explicitly.
Rational rat_from_string(const std::string& text);

std::string rat_to_string(const Rational& q);

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

Rational rat_pow(const Rational& base, unsigned exp);

// n! as a rational (used for symmetry factors).
Rational factorial(unsigned n);

// (2n-1)!! with the usual convention (-1)!! = 1.
mpz_class odd_double_factorial(int n);

}  // namespace loopfock
