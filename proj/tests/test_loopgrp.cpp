#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loopfock/loopgrp.hpp"

using namespace loopfock;

namespace {

RatMatrix scalar(const Rational& c) {
    RatMatrix m(1);
    m.at(0, 0) = c;
    return m;
}

std::pair<std::uint16_t, std::uint16_t> key(Var a, Var b) {
    return a.code() <= b.code() ? std::make_pair(a.code(), b.code()) : std::make_pair(b.code(), a.code());
}

}  // namespace

TEST_CASE("symplectic validation parity rules") {
    // N=1, upper, r_1 = c: any scalar is fine (odd power, symmetric).
    auto r1 = LoopAlgebraElement::upper(1, {scalar(rat(5, 3))});
    CHECK(!validate_symplectic(r1).has_value());
    // N=1, upper, r_2 = c != 0: even power must be antisymmetric, so scalars fail.
    auto r2 = LoopAlgebraElement::upper(1, {scalar(rat(0)), scalar(rat(1))});
    auto v = validate_symplectic(r2);
    REQUIRE(v.has_value());
    CHECK(v->l == 2);
    // zero element: ok
    CHECK(!validate_symplectic(LoopAlgebraElement::upper(1, {})).has_value());
}

TEST_CASE("quadratic hamiltonian of A(z) = 1/z reproduces the worked example") {
    auto s = LoopAlgebraElement::lower(1, {scalar(rat(1))});
    QuadHamiltonian h = quadratic_hamiltonian(s, 6);
    // P = -q_0^2/2 - sum_m q_{m+1} p_m
    CHECK(h.pp.empty());
    CHECK(h.qq.size() == 1);
    CHECK(h.qq.at(key(var(1, 0), var(1, 0))) == rat(-1, 2));
    for (int m = 0; m + 1 <= 6; ++m) CHECK(h.pq.at({var(1, m).code(), var(1, m + 1).code()}) == rat(-1));
    CHECK(h.pq.size() == 6);
}

TEST_CASE("quadratic hamiltonian of A(z) = c z") {
    Rational c = rat(3, 7);
    auto r = LoopAlgebraElement::upper(1, {scalar(c)});
    QuadHamiltonian h = quadratic_hamiltonian(r, 6);
    // P = (c/2) p_0^2 - c sum_m q_m p_{m+1}
    CHECK(h.qq.empty());
    CHECK(h.pp.size() == 1);
    CHECK(h.pp.at(key(var(1, 0), var(1, 0))) == c / 2);
    for (int m = 0; m + 1 <= 6; ++m) CHECK(h.pq.at({var(1, m + 1).code(), var(1, m).code()}) == -c);
    // A = 0 -> P = 0
    QuadHamiltonian z = quadratic_hamiltonian(LoopAlgebraElement::upper(1, {}), 6);
    CHECK((z.pp.empty() && z.pq.empty() && z.qq.empty()));
}

TEST_CASE("structural lemma: upper has no qq-part, lower no pp-part") {
    for (int i = 0; i < 20; ++i) {
        bool upper = i % 2 == 0;
        int N = 1 + (i % 3);
        auto e = random_symplectic_element(1000 + static_cast<std::uint64_t>(i), N, 1 + i % 3, upper);
        QuadHamiltonian h = quadratic_hamiltonian(e, 8);
        if (upper)
            CHECK(h.qq.empty());
        else
            CHECK(h.pp.empty());
    }
}

TEST_CASE("non-symplectic input is rejected") {
    RatMatrix bad(2);
    bad.at(0, 1) = rat(1);  // l=1 must be symmetric
    auto e = LoopAlgebraElement::upper(2, {bad});
    CHECK_THROWS_AS(quadratic_hamiltonian(e, 4), std::invalid_argument);
}

TEST_CASE("lie bracket basics") {
    auto a = random_symplectic_element(7, 2, 2, true);
    CHECK(lie_bracket(a, a).by_power.empty());
    auto b1 = random_symplectic_element(8, 1, 2, true);
    auto b2 = random_symplectic_element(9, 1, 2, true);
    CHECK(lie_bracket(b1, b2).by_power.empty());  // scalars commute
    // N=2: bracket of two symmetric r_1's lands at even power 2, antisymmetric.
    auto c1 = random_symplectic_element(10, 2, 1, true);
    auto c2 = random_symplectic_element(11, 2, 1, true);
    auto br = lie_bracket(c1, c2);
    for (const auto& [p, M] : br.by_power) {
        CHECK(p == 2);
        CHECK(M.transposed() == (p % 2 == 0 ? RatMatrix(2) - M : M));
    }
}

TEST_CASE("bracket closure under the parity condition") {
    for (int i = 0; i < 20; ++i) {
        int N = 2 + (i % 2);
        auto a = random_symplectic_element(100 + static_cast<std::uint64_t>(i), N, 2, i % 2 == 0);
        auto b = random_symplectic_element(200 + static_cast<std::uint64_t>(i), N, 2, i % 3 == 0);
        auto br = lie_bracket(a, b);
        CHECK(!validate_symplectic(br).has_value());
    }
}

TEST_CASE("pq-part determines the element (round trip)") {
    for (int i = 0; i < 10; ++i) {
        int N = 1 + (i % 3);
        bool upper = i % 2 == 0;
        auto e = random_symplectic_element(300 + static_cast<std::uint64_t>(i), N, 2, upper);
        const int bound = 8;
        QuadHamiltonian h = quadratic_hamiltonian(e, bound);
        // pq coefficient of q^nu_m p^i_{m+l} is -(A_l)_{i nu} for upper
        // (m+l <-> m swapped for lower).
        for (const auto& [power, M] : e.by_power) {
            for (int ii = 0; ii < N; ++ii)
                for (int nu = 0; nu < N; ++nu) {
                    Rational want = M.at(ii, nu);
                    int m = 2;  // probe one interior index
                    Var pv, qv;
                    if (power > 0) {
                        pv = var(ii + 1, m + power);
                        qv = var(nu + 1, m);
                    } else {
                        pv = var(ii + 1, m);
                        qv = var(nu + 1, m - power);
                    }
                    auto it = h.pq.find({pv.code(), qv.code()});
                    Rational got = it == h.pq.end() ? Rational(0) : it->second;
                    CHECK(got == -want);
                }
        }
    }
}
