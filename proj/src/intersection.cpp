#include "loopfock/intersection.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace loopfock {

bool stable(int g, int n) { return 2 * g - 2 + n > 0; }

namespace {

std::mutex memo_mutex;
std::map<std::pair<int, std::vector<int>>, Rational> memo;

Rational compute(int g, std::vector<int> levels);

// 0 for unstable or dimension-violating configurations.
Rational value(int g, std::vector<int> levels) {
    const int n = static_cast<int>(levels.size());
    if (g < 0 || !stable(g, n)) return Rational(0);
    int dim = std::accumulate(levels.begin(), levels.end(), 0);
    if (dim != 3 * g - 3 + n) return Rational(0);
    std::sort(levels.begin(), levels.end());
    {
        std::lock_guard<std::mutex> lock(memo_mutex);
        auto it = memo.find({g, levels});
        if (it != memo.end()) return it->second;
    }
    Rational r = compute(g, levels);
    std::lock_guard<std::mutex> lock(memo_mutex);
    memo.emplace(std::make_pair(g, std::move(levels)), r);
    return r;
}

// Coefficient of (t_k - delta_{k,1}) d/dt_{k+m} in the Virasoro operator L_m,
// without the common 2^{-(m+1)} factor: (2k+2m+1)!!/(2k-1)!!.
Rational linear_coeff(int k, int m) {
    return Rational(odd_double_factorial(k + m + 1)) / Rational(odd_double_factorial(k));
}

Rational compute(int g, std::vector<int> levels) {
    // levels sorted ascending; dimension constraint holds; (g,n) stable.
    const int n = static_cast<int>(levels.size());
    const int kmax = levels.back();
    if (kmax == 0) return Rational(1);  // dimension forces (g,n) = (0,3)

    // Reduce the largest level via the L_m constraint, m = kmax - 1 >= 0.
    const int m = kmax - 1;
    std::vector<int> rest(levels.begin(), levels.end() - 1);
    const int nr = static_cast<int>(rest.size());

    Rational acc(0);

    // t_k d/dt_{k+m} terms: one derivative slot is consumed by t_{k_j}.
    for (int j = 0; j < nr; ++j) {
        std::vector<int> sub = rest;
        sub.erase(sub.begin() + j);
        sub.push_back(rest[j] + m);
        acc += linear_coeff(rest[j], m) * value(g, std::move(sub));
    }

    // hbar/2 * sum_{a+b=m-1} (2a+1)!!(2b+1)!! d_a d_b: one genus down, plus
    // all stable splittings of the remaining insertions.
    for (int a = 0; a + a <= m - 1; ++a) {
        const int b = m - 1 - a;
        Rational w = Rational(odd_double_factorial(a + 1) * odd_double_factorial(b + 1), 2);
        if (a != b) w *= 2;  // (a,b) and (b,a) both occur
        {
            std::vector<int> sub = rest;
            sub.push_back(a);
            sub.push_back(b);
            acc += w * value(g - 1, std::move(sub));
        }
        for (int gp = 0; gp <= g; ++gp) {
            for (unsigned mask = 0; mask < (1u << nr); ++mask) {
                std::vector<int> left{a}, right{b};
                for (int j = 0; j < nr; ++j)
                    (mask >> j & 1u ? left : right).push_back(rest[j]);
                Rational vl = value(gp, std::move(left));
                if (is_zero(vl)) continue;
                acc += w * vl * value(g - gp, std::move(right));
            }
        }
    }

    // L_0 central term: 1/16 in L_0, times the 2^{m+1} the whole relation was
    // scaled by (m = 0 here). Only reachable with g = 1 and no spectators.
    if (m == 0 && g == 1 && nr == 0) acc += Rational(1, 8);

    // The relation, scaled by 2^{m+1}, reads
    //   (2m+3)!! <tau_{m+1} S>_g = linear terms + quadratic terms + central,
    // which pins every normalization above; cross-checked against
    // <tau_1>_1 = 1/24 and <tau_4>_2 = 1/1152.
    return acc / Rational(odd_double_factorial(m + 2));
}

}  // namespace

Rational intersection_number(const IntersectionKey& key) {
    const int n = static_cast<int>(key.levels.size());
    if (!stable(key.g, n))
        throw std::domain_error("unstable intersection index (g=" + std::to_string(key.g) +
                                ", n=" + std::to_string(n) + ")");
    for (int k : key.levels)
        if (k < 0) throw std::domain_error("negative descendent level");
    return value(key.g, key.levels);
}

void intersection_cache_clear() {
    std::lock_guard<std::mutex> lock(memo_mutex);
    memo.clear();
}

}  // namespace loopfock
