#include "loopfock/rational.hpp"

namespace loopfock {

Rational rat_from_string(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    for (char c : text) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/'))
            throw std::invalid_argument("bad rational literal: '" + text + "'");
    }
    Rational q;
    if (q.set_str(text, 10) != 0)
        throw std::invalid_argument("bad rational literal: '" + text + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    q.canonicalize();
    return q;
}

std::string rat_to_string(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational rat_pow(const Rational& base, unsigned exp) {
    Rational r(1);
    Rational b = base;
    while (exp) {
        if (exp & 1u) r *= b;
        b *= b;
        exp >>= 1u;
    }
    return r;
}

Rational factorial(unsigned n) {
    mpz_class z;
    mpz_fac_ui(z.get_mpz_t(), n);
    return Rational(z);
}

mpz_class odd_double_factorial(int n) {
    // (2n-1)!! = 1*3*5*...*(2n-1); n <= 0 gives 1.
    mpz_class r(1);
    for (int i = 1; i <= n; ++i) r *= 2 * i - 1;
    return r;
}

}  // namespace loopfock
