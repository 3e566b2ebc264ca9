#include "loopfock/loopgrp.hpp"

#include <random>
#include <stdexcept>

namespace loopfock {

RatMatrix RatMatrix::operator*(const RatMatrix& o) const {
    RatMatrix r(N);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < N; ++k) {
            const Rational& x = at(i, k);
            if (loopfock::is_zero(x)) continue;
            for (int j = 0; j < N; ++j) r.at(i, j) += x * o.at(k, j);
        }
    return r;
}

RatMatrix RatMatrix::operator-(const RatMatrix& o) const {
    RatMatrix r(N);
    for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = a[i] - o.a[i];
    return r;
}

RatMatrix RatMatrix::transposed() const {
    RatMatrix r(N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r.at(j, i) = at(i, j);
    return r;
}

LoopAlgebraElement LoopAlgebraElement::lower(int N, const std::vector<RatMatrix>& s) {
    LoopAlgebraElement e;
    e.kind = Kind::lower;
    e.N = N;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!s[i].is_zero()) e.by_power.emplace(-static_cast<int>(i) - 1, s[i]);
    return e;
}

LoopAlgebraElement LoopAlgebraElement::upper(int N, const std::vector<RatMatrix>& r) {
    LoopAlgebraElement e;
    e.kind = Kind::upper;
    e.N = N;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (!r[i].is_zero()) e.by_power.emplace(static_cast<int>(i) + 1, r[i]);
    return e;
}

bool LoopAlgebraElement::pure_upper() const {
    for (const auto& [p, M] : by_power)
        if (p <= 0 && !M.is_zero()) return false;
    return true;
}

bool LoopAlgebraElement::pure_lower() const {
    for (const auto& [p, M] : by_power)
        if (p >= 0 && !M.is_zero()) return false;
    return true;
}

LoopAlgebraElement LoopAlgebraElement::negated() const {
    LoopAlgebraElement e = *this;
    for (auto& [p, M] : e.by_power)
        for (auto& x : M.a) x = -x;
    return e;
}

std::optional<SymplecticViolation> validate_symplectic(const LoopAlgebraElement& e) {
    for (const auto& [p, M] : e.by_power) {
        // A(z) with A*(-z) + A(z) = 0 in an orthonormal basis means
        // A_p^T = (-1)^{p+1} A_p for every power p.
        const int sign = (p % 2 == 0) ? -1 : 1;
        for (int i = 0; i < e.N; ++i)
            for (int j = 0; j < e.N; ++j) {
                Rational want = Rational(sign) * M.at(i, j);
                if (M.at(j, i) != want) {
                    return SymplecticViolation{
                        p < 0 ? -p : p, i, j,
                        "matrix at z-power " + std::to_string(p) + " violates the parity symmetry at (" +
                            std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"};
                }
            }
    }
    return std::nullopt;
}

QuadHamiltonian quadratic_hamiltonian(const LoopAlgebraElement& e, int index_bound) {
    if (auto v = validate_symplectic(e))
        throw std::invalid_argument("non-symplectic element: " + v->message);
    QuadHamiltonian h;
    h.N = e.N;
    h.index_bound = index_bound;

    auto sym_key = [](std::uint16_t a, std::uint16_t b) {
        return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    auto put = [](auto& table, std::pair<std::uint16_t, std::uint16_t> key, const Rational& c) {
        auto it = table.find(key);
        if (it == table.end()) {
            if (!is_zero(c)) table.emplace(key, c);
        } else {
            it->second += c;
            if (is_zero(it->second)) table.erase(it);
        }
    };

    // P(A)(f) = 1/2 [sum (Af)_p q - sum (Af)_q p] over Darboux coordinates:
    // expand A z^power against the two coordinate families of f. Signs come
    // from the (-z)^{-k-1} convention of the p-basis; the dim H = 1,
    // A(z) = 1/z example reproduces -q_0^2/2 - sum q_{m+1} p_m exactly.
    for (const auto& [power, M] : e.by_power) {
        for (int i = 0; i < e.N; ++i)
            for (int nu = 0; nu < e.N; ++nu) {
                const Rational& c = M.at(i, nu);
                if (is_zero(c)) continue;
                Var vi_base{static_cast<std::uint8_t>(i + 1), 0};
                Var vnu_base{static_cast<std::uint8_t>(nu + 1), 0};
                for (int m = 0; m <= index_bound; ++m) {
                    Var q_nu{vnu_base.mu, static_cast<std::uint8_t>(m)};
                    Var p_nu = q_nu;
                    // Contribution of the q^nu_m component of f.
                    int epos = m + power;
                    if (epos >= 0) {
                        if (epos <= index_bound) {
                            Var p_i{vi_base.mu, static_cast<std::uint8_t>(epos)};
                            put(h.pq, {p_i.code(), q_nu.code()}, Rational(-1, 2) * c);
                        }
                    } else {
                        int k = -epos - 1;
                        if (k <= index_bound) {
                            Var q_i{vi_base.mu, static_cast<std::uint8_t>(k)};
                            Rational s = (k % 2 == 0) ? Rational(-1, 2) : Rational(1, 2);  // (-1)^{k+1}/2
                            put(h.qq, sym_key(q_nu.code(), q_i.code()), s * c);
                        }
                    }
                    // Contribution of the p^nu_m component of f.
                    int eneg = power - m - 1;
                    if (eneg >= 0) {
                        if (eneg <= index_bound) {
                            Var p_i{vi_base.mu, static_cast<std::uint8_t>(eneg)};
                            Rational s = (m % 2 == 0) ? Rational(-1) : Rational(1);
                            put(h.pp, sym_key(p_nu.code(), p_i.code()), Rational(-1, 2) * s * c);
                        }
                    } else {
                        int k = m - power;
                        if (k <= index_bound) {
                            Var q_i{vi_base.mu, static_cast<std::uint8_t>(k)};
                            Rational s = (power % 2 == 0) ? Rational(1) : Rational(-1);
                            put(h.pq, {p_nu.code(), q_i.code()}, Rational(1, 2) * s * c);
                        }
                    }
                }
            }
    }
    return h;
}

LoopAlgebraElement random_symplectic_element(std::uint64_t seed, int N, int l_max, bool upper,
                                             int max_abs) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-max_abs, max_abs), den(1, max_abs);
    auto draw = [&]() { return rat(num(rng), den(rng)); };
    std::vector<RatMatrix> mats;
    for (int l = 1; l <= l_max; ++l) {
        RatMatrix M(N);
        if (l % 2 == 1) {  // symmetric
            for (int i = 0; i < N; ++i)
                for (int j = i; j < N; ++j) M.at(i, j) = M.at(j, i) = draw();
        } else {  // antisymmetric
            for (int i = 0; i < N; ++i)
                for (int j = i + 1; j < N; ++j) {
                    Rational v = draw();
                    M.at(i, j) = v;
                    M.at(j, i) = -v;
                }
        }
        mats.push_back(std::move(M));
    }
    return upper ? LoopAlgebraElement::upper(N, mats) : LoopAlgebraElement::lower(N, mats);
}

LoopAlgebraElement lie_bracket(const LoopAlgebraElement& a, const LoopAlgebraElement& b) {
    if (a.N != b.N) throw std::invalid_argument("bracket of elements with different N");
    LoopAlgebraElement out;
    out.N = a.N;
    out.kind = LoopAlgebraElement::Kind::general;
    for (const auto& [pa, Ma] : a.by_power)
        for (const auto& [pb, Mb] : b.by_power) {
            RatMatrix c = Ma * Mb - Mb * Ma;
            if (c.is_zero()) continue;
            auto [it, inserted] = out.by_power.emplace(pa + pb, c);
            if (!inserted) {
                for (std::size_t i = 0; i < c.a.size(); ++i) it->second.a[i] += c.a[i];
                if (it->second.is_zero()) out.by_power.erase(it);
            }
        }
    return out;
}

}  // namespace loopfock
