#include "loopfock/vertex.hpp"

#include <stdexcept>

namespace loopfock {

namespace {

// Enumerates level multisets k_1 <= ... <= k_n with sum = target, k <= K,
// feeding each into the visitor.
template <typename Visit>
void enumerate_partitions(int n, int target, int kmax, std::vector<int>& acc, int min_level, Visit&& visit) {
    if (n == 0) {
        if (target == 0) visit(acc);
        return;
    }
    for (int k = min_level; k <= kmax; ++k) {
        // Remaining levels are all >= k, so n*k <= target is required.
        if (k * n > target) break;
        acc.push_back(k);
        enumerate_partitions(n - 1, target - k, kmax, acc, k, visit);
        acc.pop_back();
    }
}

Rational symmetry_factor(const std::vector<int>& levels) {
    Rational f(1);
    std::size_t i = 0;
    while (i < levels.size()) {
        std::size_t j = i;
        while (j < levels.size() && levels[j] == levels[i]) ++j;
        f *= factorial(static_cast<unsigned>(j - i));
        i = j;
    }
    return f;
}

}  // namespace

Potential point_potential(const Window& w) {
    if (w.N != 1) throw std::invalid_argument("point potential requires N = 1");
    Potential p(w, {Rational(1)});
    for (int g = 0; g <= w.G; ++g) {
        auto& Fg = p.F[static_cast<std::size_t>(g)];
        for (int n = 1; n <= w.D; ++n) {
            if (!stable(g, n)) continue;
            const int target = 3 * g - 3 + n;  // dimension constraint
            if (target < 0 || target > w.L) continue;
            std::vector<int> acc;
            enumerate_partitions(n, target, w.K, acc, 0, [&](const std::vector<int>& levels) {
                Rational v = intersection_number({g, levels});
                if (is_zero(v)) return;
                std::vector<std::uint16_t> codes;
                codes.reserve(levels.size());
                for (int k : levels) codes.push_back(var(1, k).code());
                Fg.accumulate(Monomial(std::move(codes)), v / symmetry_factor(levels));
            });
        }
    }
    return p;
}

Potential product_vertex(const Window& w) {
    Window point_window(1, w.K, w.D, w.G, w.L);
    Potential pt = point_potential(point_window);
    Potential p(w, std::vector<Rational>(static_cast<std::size_t>(w.N), Rational(1)));
    for (int g = 0; g <= w.G; ++g) {
        auto& Fg = p.F[static_cast<std::size_t>(g)];
        for (const auto& [key, c] : pt.F[static_cast<std::size_t>(g)].terms()) {
            for (int mu = 1; mu <= w.N; ++mu) {
                std::vector<std::uint16_t> codes;
                codes.reserve(static_cast<std::size_t>(key.mono.degree()));
                for (int i = 0; i < key.mono.degree(); ++i)
                    codes.push_back(var(mu, key.mono.at(i).k).code());
                Fg.accumulate(Monomial(std::move(codes)), c);
            }
        }
    }
    return p;
}

}  // namespace loopfock
