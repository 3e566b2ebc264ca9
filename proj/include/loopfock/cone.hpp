#pragma once

#include <map>

#include "loopfock/potential.hpp"

namespace loopfock {

// Truncated bivariate polynomial in two nilpotent parameters (the formal
// curve parameter and the ruling parameter), with exact coefficients.
class Jet {
  public:
    Jet() = default;
    Jet(int e_ord, int d_ord)
        : eo_(e_ord), do_(d_ord), c_(static_cast<std::size_t>(e_ord + 1) * (d_ord + 1), Rational(0)) {}

    static Jet constant(int eo, int d, const Rational& v) {
        Jet j(eo, d);
        j.at(0, 0) = v;
        return j;
    }

    int e_order() const { return eo_; }
    int d_order() const { return do_; }
    Rational& at(int i, int j) { return c_[static_cast<std::size_t>(i) * (do_ + 1) + j]; }
    const Rational& at(int i, int j) const { return c_[static_cast<std::size_t>(i) * (do_ + 1) + j]; }

    bool is_zero() const {
        for (const auto& x : c_)
            if (!loopfock::is_zero(x)) return false;
        return true;
    }

    Jet operator+(const Jet& o) const;
    Jet operator-(const Jet& o) const;
    Jet operator*(const Jet& o) const;
    Jet scaled(const Rational& r) const;

    friend bool operator==(const Jet& a, const Jet& b) { return a.c_ == b.c_; }
    std::string str() const;

  private:
    int eo_ = 0;
    int do_ = 0;
    std::vector<Rational> c_;
};

// t-coordinate assignment with jet values; variables absent from the map are
// zero at the sample point.
using JetAssignment = std::map<std::uint16_t, Jet>;

Jet eval_series_at(const TruncatedSeries& s, const JetAssignment& t, int eo, int d_ord);

// Local model of the graph of dF_0 at the formal point t = eps * direction:
// the p-coordinates and the tangent-frame (Hessian) entries, as jets.
struct ConeJetModel {
    int jet_order = 0;
    JetAssignment t_point;                                        // t-coordinates of the point
    std::map<std::uint16_t, Jet> p;                               // (mu,k) -> dF0/dq
    std::map<std::pair<std::uint16_t, std::uint16_t>, Jet> hess;  // tangent frame
};

ConeJetModel cone_jet(const TruncatedSeries& F0, const std::vector<Rational>& unit,
                      const std::map<std::uint16_t, Rational>& direction, int jet_order);

// The four cone axioms at jet order, checked on formal sample points
// t = eps * direction and ruling directions spanned by the tangent frame:
//  (1) the point lies in its own tangent space (cone through the origin),
//  (2) z maps the tangent space into itself,
//  (3) the z-image of the tangent space stays inside the cone,
//  (4) the tangent frame is constant along the z-image ruling.
// Failures are recorded with witnesses; nothing throws.
struct ConeAxiomReport {
    bool cone_through_origin = true;
    bool z_stabilizes_tangent = true;
    bool ruling_in_cone = true;
    bool tangent_constant_on_ruling = true;
    std::vector<std::string> witnesses;
    std::string scope;

    bool all() const {
        return cone_through_origin && z_stabilizes_tangent && ruling_in_cone && tangent_constant_on_ruling;
    }
};

ConeAxiomReport check_cone_axioms(const TruncatedSeries& F0, const std::vector<Rational>& unit,
                                  const std::vector<std::map<std::uint16_t, Rational>>& directions,
                                  int jet_order);

}  // namespace loopfock
