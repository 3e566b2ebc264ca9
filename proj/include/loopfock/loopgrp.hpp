#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loopfock/rational.hpp"
#include "loopfock/window.hpp"

namespace loopfock {

struct RatMatrix {
    int N = 0;
    std::vector<Rational> a;  // row-major

    RatMatrix() = default;
    explicit RatMatrix(int n) : N(n), a(static_cast<std::size_t>(n) * n, Rational(0)) {}

    Rational& at(int i, int j) { return a[static_cast<std::size_t>(i) * N + j]; }
    const Rational& at(int i, int j) const { return a[static_cast<std::size_t>(i) * N + j]; }

    bool is_zero() const {
        for (const auto& x : a)
            if (!loopfock::is_zero(x)) return false;
        return true;
    }
    RatMatrix operator*(const RatMatrix& o) const;
    RatMatrix operator-(const RatMatrix& o) const;
    RatMatrix transposed() const;
    friend bool operator==(const RatMatrix& x, const RatMatrix& y) { return x.N == y.N && x.a == y.a; }
};

// A finite Laurent polynomial A(z) = sum_p A_p z^p with matrix coefficients,
// tagged by which triangular family it came from. Elements read from files
// are strictly lower (powers -l) or upper (powers +l), l >= 1; brackets of
// mixed elements may carry both signs and power 0.
struct LoopAlgebraElement {
    enum class Kind { lower, upper, general };

    Kind kind = Kind::general;
    int N = 1;
    std::map<int, RatMatrix> by_power;  // z-power -> coefficient matrix

    static LoopAlgebraElement lower(int N, const std::vector<RatMatrix>& s);  // s[i] is s_{i+1}
    static LoopAlgebraElement upper(int N, const std::vector<RatMatrix>& r);

    int l_max() const {
        int m = 0;
        for (const auto& [p, M] : by_power)
            if (!M.is_zero()) m = std::max(m, p < 0 ? -p : p);
        return m;
    }
    bool pure_upper() const;
    bool pure_lower() const;
    LoopAlgebraElement negated() const;
};

// One violation of the symplectic parity condition A_l^T = (-1)^{l+1} A_l.
struct SymplecticViolation {
    int l;  // |z-power| as indexed in the input
    int i;
    int j;
    std::string message;
};

// Empty optional means the element is an infinitesimal symplectic
// transformation (the per-power parity condition holds exactly).
std::optional<SymplecticViolation> validate_symplectic(const LoopAlgebraElement& e);

// Quadratic hamiltonian P(A)(f) = 1/2 Omega(Af, f), expanded over Darboux
// coordinates with indices up to index_bound. Upper elements produce no
// qq-part and lower elements no pp-part.
struct QuadHamiltonian {
    int N = 1;
    int index_bound = 0;
    // pp/qq: symmetric tables keyed by unordered (code_a <= code_b); the value
    // is the full coefficient of the monomial p_a p_b (resp. q_a q_b).
    std::map<std::pair<std::uint16_t, std::uint16_t>, Rational> pp, qq;
    // pq: coefficient of q_B p_A keyed by (A = p-variable, B = q-variable).
    std::map<std::pair<std::uint16_t, std::uint16_t>, Rational> pq;

    bool operator==(const QuadHamiltonian& o) const {
        return N == o.N && pp == o.pp && qq == o.qq && pq == o.pq;
    }
};

QuadHamiltonian quadratic_hamiltonian(const LoopAlgebraElement& e, int index_bound);

// Matrix commutator per z-power: [a,b]_l = sum_{i+j=l} (a_i b_j - b_j a_i).
LoopAlgebraElement lie_bracket(const LoopAlgebraElement& a, const LoopAlgebraElement& b);

// Seeded random symplectic element with the parity symmetry built in; matrix
// entries are rationals with numerator and denominator bounded by max_abs.
LoopAlgebraElement random_symplectic_element(std::uint64_t seed, int N, int l_max, bool upper,
                                             int max_abs = 7);

}  // namespace loopfock
