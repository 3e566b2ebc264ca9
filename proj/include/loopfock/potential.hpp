#pragma once

#include <string>
#include <vector>

#include "loopfock/series.hpp"

namespace loopfock {

// Dimension grade of a coefficient stratum: level_sum - degree - 3(g-1).
// Vertex data is concentrated at dim 0; upper-triangular actions move terms
// to dim < 0 (by their total z-weight), lower-triangular to dim > 0.
inline int dim_grade(int g, int degree, int level_sum) { return level_sum - degree - 3 * (g - 1); }

// Tracks where a potential's coefficients are provably exact relative to the
// window they were computed on, and which out-of-window coefficients are
// known to vanish. See relations.cpp for how assertions consume this.
struct ExactRegion {
    enum class History { pristine, upper, lower, mixed };

    Window build;            // window the stored data was computed on
    History history = History::pristine;
    long weight_budget = 0;  // total z-weight applied across all actions

    // True if the coefficient at (g, degree, level_sum) vanishes for dimension
    // reasons even outside the stored window.
    bool knows_zero(int g, int degree, int level_sum) const {
        const int d = dim_grade(g, degree, level_sum);
        switch (history) {
            case History::pristine: return d != 0;
            case History::upper: return d > 0 || d < -weight_budget;
            case History::lower: return d < 0 || d > weight_budget;
            case History::mixed: return false;
        }
        return false;
    }

    // True if the stored coefficient at this stratum is exact: all source data
    // its computation pulled on stayed inside the build window.
    bool exact_at(int g, int degree, int level_sum, int max_level) const;

    // After acting with an element of the given kind (upper: raises weight by
    // z-powers up to l_max per application).
    ExactRegion after_action(bool upper, int weight_used) const;

    static const char* history_name(History h);
};

// Index of a correlator: genus plus a list of insertions (mu, k). The value
// is symmetric under permutation of the insertions.
struct CorrelatorIndex {
    int g = 0;
    std::vector<Var> insertions;

    Monomial monomial() const {
        std::vector<std::uint16_t> codes;
        codes.reserve(insertions.size());
        for (auto v : insertions) codes.push_back(v.code());
        return Monomial(std::move(codes));
    }
};

// Genus-graded family F_0..F_G of truncated series together with the
// distinguished direction. The components are plain grade-0 series.
struct Potential {
    Window window;
    std::vector<Rational> unit;        // coordinates of the unit vector, size N
    std::vector<TruncatedSeries> F;    // size G+1
    ExactRegion exact;

    Potential() = default;
    Potential(const Window& w, std::vector<Rational> unit_vec);

    // Checks the strict invariants: F_0 starts cubic, F_g (g>=1) has no
    // constant term, all components share the window. Throws on violation.
    void validate_strict() const;

    bool operator==(const Potential& o) const { return window == o.window && unit == o.unit && F == o.F; }
};

// Iterated t-derivative of F_g at t = 0.
Rational correlator(const Potential& p, const CorrelatorIndex& idx);

// Same, but returns 0 for indices outside the window instead of throwing;
// internal plumbing for flow formulas that probe near the boundary.
Rational correlator_or_zero(const Potential& p, int g, const Monomial& mono);

// Derivative value encoded by a series coefficient: coeff times the product
// of insertion multiplicities factorial.
Rational derivative_value(const TruncatedSeries& s, const Monomial& mono, int hbar = 0);

// Re-expands around the dilaton-shifted point: t_to_q substitutes
// t^mu_1 = q^mu_1 + unit_mu into every component, q_to_t undoes it.
enum class ShiftDirection { t_to_q, q_to_t };
Potential dilaton_shift(const Potential& p, ShiftDirection dir);

// tau = exp(sum_g hbar^{g-1} F_g) as a genus-graded series, and its inverse.
// The grade range used is lossless for potentials satisfying the strict
// invariants; tau_to_potential extracts grades -1..G-1.
TruncatedSeries potential_to_tau(const Potential& p);
Potential tau_to_potential(const TruncatedSeries& tau, const std::vector<Rational>& unit);

// Lossless grade bounds for tau-forms of strict potentials on this window.
int tau_grade_floor(const Window& w);
int tau_grade_ceiling(const Window& w);

// Copies the potential into a larger window (same N and G, caps must not
// shrink). Coefficients outside the original window stay zero, which is
// exactly what operator-route computations with headroom need.
Potential embed(const Potential& p, const Window& bigger);

}  // namespace loopfock
