#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "loopfock/potential.hpp"
#include "loopfock/vertex.hpp"

using namespace loopfock;

TEST_CASE("intersection numbers: frozen golden values") {
    CHECK(intersection_number({0, {0, 0, 0}}) == rat(1));
    CHECK(intersection_number({1, {1}}) == rat(1, 24));
    CHECK(intersection_number({2, {4}}) == rat(1, 1152));
    CHECK(intersection_number({2, {2, 3}}) == rat(29, 5760));
    CHECK(intersection_number({0, {1, 0, 0, 0}}) == rat(1));
    CHECK(intersection_number({1, {0, 2}}) == rat(1, 24));
    CHECK(intersection_number({1, {1, 1}}) == rat(1, 24));
}

TEST_CASE("intersection numbers: dimension constraint and stability") {
    CHECK(intersection_number({0, {1, 1, 1}}) == rat(0));
    CHECK(intersection_number({1, {2}}) == rat(0));
    CHECK_THROWS_AS(intersection_number({0, {0, 0}}), std::domain_error);
    CHECK_THROWS_AS(intersection_number({1, {}}), std::domain_error);
}

TEST_CASE("genus-0 closed form (n-3)!/prod k!") {
    std::mt19937_64 rng(5);
    for (int n = 3; n <= 8; ++n) {
        // random level tuple with sum n-3
        for (int rep = 0; rep < 4; ++rep) {
            std::vector<int> ks(static_cast<std::size_t>(n), 0);
            int left = n - 3;
            std::uniform_int_distribution<int> pick(0, n - 1);
            while (left > 0) {
                ks[static_cast<std::size_t>(pick(rng))] += 1;
                --left;
            }
            Rational denom(1);
            for (int k : ks) denom *= factorial(static_cast<unsigned>(k));
            Rational want = factorial(static_cast<unsigned>(n - 3)) / denom;
            CHECK(intersection_number({0, ks}) == want);
        }
    }
}

TEST_CASE("string equation consistency of the oracle") {
    // <tau_0 prod tau_{k_j}>_g = sum_j <... tau_{k_j - 1} ...>_g
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        std::uniform_int_distribution<int> gd(0, 2), nd(1, 5);
        int g = gd(rng), n = nd(rng);
        // the identity reduces to n-point correlators, so both sides must be stable
        if (!stable(g, n + 1) || !stable(g, n)) continue;
        int dim = 3 * g - 3 + (n + 1);
        if (dim < 0) continue;
        // random levels with sum = dim over n slots (the extra slot is tau_0)
        std::vector<int> ks(static_cast<std::size_t>(n), 0);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int left = dim; left > 0; --left) ks[static_cast<std::size_t>(pick(rng))] += 1;
        std::vector<int> with0 = ks;
        with0.push_back(0);
        Rational lhs = intersection_number({g, with0});
        Rational rhs(0);
        for (std::size_t j = 0; j < ks.size(); ++j) {
            if (ks[j] == 0) continue;
            std::vector<int> low = ks;
            low[j] -= 1;
            if (!stable(g, n)) continue;
            rhs += intersection_number({g, low});
        }
        CHECK(lhs == rhs);
    }
}

TEST_CASE("dilaton equation consistency of the oracle") {
    // <tau_1 X>_g = (2g - 2 + n) <X>_g
    std::vector<std::pair<int, std::vector<int>>> cases = {
        {0, {0, 0, 0}}, {1, {1}}, {1, {0, 2}}, {2, {4}}, {2, {2, 3}}};
    for (const auto& [g, ks] : cases) {
        std::vector<int> with1 = ks;
        with1.push_back(1);
        Rational want = Rational(2 * g - 2 + static_cast<int>(ks.size())) * intersection_number({g, ks});
        CHECK(intersection_number({g, with1}) == want);
    }
}

TEST_CASE("point potential coefficients and dimension support") {
    Window w(1, 9, 6, 2, 9);
    Potential p = point_potential(w);
    p.validate_strict();
    Var t0 = var(1, 0), t1 = var(1, 1);
    CHECK(p.F[0].coeff(Monomial::single(t0).with(t0).with(t0)) == rat(1, 6));
    CHECK(p.F[1].coeff(Monomial::single(t1)) == rat(1, 24));
    for (int g = 0; g <= w.G; ++g)
        for (const auto& [key, c] : p.F[static_cast<std::size_t>(g)].terms()) {
            CHECK(key.mono.level_sum() == 3 * g - 3 + key.mono.degree());
        }
}

TEST_CASE("correlator values and symmetry") {
    Window w(1, 9, 6, 2, 9);
    Potential p = point_potential(w);
    CHECK(correlator(p, {0, {var(1, 0), var(1, 0), var(1, 0)}}) == rat(1));
    CHECK(correlator(p, {1, {var(1, 1)}}) == rat(1, 24));
    CHECK(correlator(p, {0, {var(1, 1), var(1, 0), var(1, 0), var(1, 0)}}) == rat(1));
    CHECK(correlator(p, {0, {var(1, 0), var(1, 1), var(1, 0), var(1, 0)}}) == rat(1));
    CHECK_THROWS_AS(correlator(p, {0, {var(2, 0)}}), std::out_of_range);
}

TEST_CASE("product vertex: product structure") {
    Window w(2, 6, 6, 2, 9);
    Potential p = product_vertex(w);
    Var a0 = var(1, 0), b0 = var(2, 0);
    CHECK(p.F[0].coeff(Monomial::single(a0).with(a0).with(a0)) == rat(1, 6));
    CHECK(p.F[0].coeff(Monomial::single(a0).with(a0).with(b0)) == rat(0));
    CHECK(correlator(p, {1, {var(1, 1)}}) == rat(1, 24));
    CHECK(correlator(p, {1, {var(2, 1)}}) == rat(1, 24));
    // every mixed-direction correlator vanishes
    for (const auto& [key, c] : p.F[2].terms()) {
        bool mixed = false;
        for (int i = 1; i < key.mono.degree(); ++i)
            if (key.mono.at(i).mu != key.mono.at(0).mu) mixed = true;
        CHECK(!mixed);
    }
    // N=1 reduces to the point potential
    Window w1(1, 6, 6, 2, 9);
    CHECK(product_vertex(w1).F[1] == point_potential(w1).F[1]);
}

TEST_CASE("dilaton shift round trip and shift point") {
    Window w(1, 4, 4, 1, 7);
    Potential p = point_potential(w);
    Potential q = dilaton_shift(p, ShiftDirection::t_to_q);
    Potential back = dilaton_shift(q, ShiftDirection::q_to_t);
    CHECK(back == p);
    // t = 0 corresponds to q_1 = -1: the q-expansion of F around q = -z 1
    // evaluates at q = 0 to the t-series at t_1 = 1.
    Var t1 = var(1, 1);
    TruncatedSeries expect(w);
    for (const auto& [key, c] : p.F[0].terms()) {
        // substitute t_1 -> 1
        Monomial rest;
        Rational coeff = c;
        for (int i = 0; i < key.mono.degree(); ++i) {
            Var v = key.mono.at(i);
            if (v == t1) continue;
            rest = rest.with(v);
        }
        expect.accumulate(rest, coeff);
    }
    TruncatedSeries got(w);
    for (const auto& [key, c] : q.F[0].terms()) {
        bool has1 = false;
        for (int i = 0; i < key.mono.degree(); ++i)
            if (key.mono.at(i) == t1) has1 = true;
        if (!has1) got.accumulate(key.mono, c);
    }
    CHECK(got == expect);
}

TEST_CASE("potential to tau and back") {
    Window w(1, 9, 6, 2, 9);
    Potential p = point_potential(w);
    TruncatedSeries tau = potential_to_tau(p);
    CHECK(tau.coeff(Monomial::one(), 0) == rat(1));
    Potential back = tau_to_potential(tau, p.unit);
    for (int g = 0; g <= w.G; ++g) CHECK(back.F[static_cast<std::size_t>(g)] == p.F[static_cast<std::size_t>(g)]);
}

TEST_CASE("tau of a cubic-only potential") {
    Window w(1, 0, 6, 0, 6);
    Potential p(w, {rat(1)});
    Var t0 = var(1, 0);
    p.F[0].accumulate(Monomial::single(t0).with(t0).with(t0), rat(1, 6));
    TruncatedSeries tau = potential_to_tau(p);
    Monomial cube = Monomial::single(t0).with(t0).with(t0);
    Monomial six = cube.merged(cube);
    CHECK(tau.coeff(Monomial::one(), 0) == rat(1));
    CHECK(tau.coeff(cube, -1) == rat(1, 6));
    CHECK(tau.coeff(six, -2) == rat(1, 72));
    // zero potential -> tau = 1
    Potential z(w, {rat(1)});
    CHECK(potential_to_tau(z).size() == 1);
}

TEST_CASE("tau round trip on random strict potentials") {
    std::mt19937_64 rng(41);
    Window w(2, 3, 5, 2, 8);
    std::uniform_int_distribution<int> mu(1, w.N), kk(0, w.K), num(-4, 4), den(1, 5);
    for (int rep = 0; rep < 20; ++rep) {
        Potential p(w, {rat(1), rat(1)});
        for (int g = 0; g <= w.G; ++g) {
            std::uniform_int_distribution<int> deg(g == 0 ? 3 : 1, w.D);
            for (int t = 0; t < 6; ++t) {
                int d = deg(rng);
                std::vector<std::uint16_t> codes;
                int lsum = 0;
                for (int i = 0; i < d; ++i) {
                    int k = kk(rng);
                    if (lsum + k > w.L) k = 0;
                    lsum += k;
                    codes.push_back(var(mu(rng), k).code());
                }
                p.F[static_cast<std::size_t>(g)].accumulate(Monomial(std::move(codes)), rat(num(rng), den(rng)));
            }
        }
        p.validate_strict();
        Potential back = tau_to_potential(potential_to_tau(p), p.unit);
        for (int g = 0; g <= w.G; ++g)
            CHECK(back.F[static_cast<std::size_t>(g)] == p.F[static_cast<std::size_t>(g)]);
    }
}
