#include "loopfock/cone.hpp"

#include <sstream>
#include <stdexcept>

namespace loopfock {

Jet Jet::operator+(const Jet& o) const {
    Jet r = *this;
    for (int i = 0; i <= eo_; ++i)
        for (int j = 0; j <= do_; ++j) r.at(i, j) += o.at(i, j);
    return r;
}

Jet Jet::operator-(const Jet& o) const {
    Jet r = *this;
    for (int i = 0; i <= eo_; ++i)
        for (int j = 0; j <= do_; ++j) r.at(i, j) -= o.at(i, j);
    return r;
}

Jet Jet::operator*(const Jet& o) const {
    Jet r(eo_, do_);
    for (int i = 0; i <= eo_; ++i)
        for (int j = 0; j <= do_; ++j) {
            if (loopfock::is_zero(at(i, j))) continue;
            for (int a = 0; i + a <= eo_; ++a)
                for (int b = 0; j + b <= do_; ++b) r.at(i + a, j + b) += at(i, j) * o.at(a, b);
        }
    return r;
}

Jet Jet::scaled(const Rational& v) const {
    Jet r = *this;
    for (auto& x : r.c_) x *= v;
    return r;
}

std::string Jet::str() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i <= eo_; ++i)
        for (int j = 0; j <= do_; ++j) {
            if (loopfock::is_zero(at(i, j))) continue;
            if (!first) os << " + ";
            first = false;
            os << rat_to_string(at(i, j));
            if (i) os << "*e^" << i;
            if (j) os << "*d^" << j;
        }
    return first ? "0" : os.str();
}

Jet eval_series_at(const TruncatedSeries& s, const JetAssignment& t, int eo, int d_ord) {
    Jet acc(eo, d_ord);
    for (const auto& [key, c] : s.terms()) {
        if (key.hbar != 0) throw std::invalid_argument("jet evaluation expects a plain genus-0 series");
        Jet term = Jet::constant(eo, d_ord, c);
        bool dead = false;
        for (int i = 0; i < key.mono.degree() && !dead; ++i) {
            auto it = t.find(key.mono.at(i).code());
            if (it == t.end()) {
                dead = true;
                break;
            }
            term = term * it->second;
            if (term.is_zero()) dead = true;
        }
        if (!dead) acc = acc + term;
    }
    return acc;
}

namespace {

// q-coordinates of the sample point: q = t - z*unit, i.e. the level-1
// variables are shifted by -unit.
JetAssignment q_point(const Window& w, const std::vector<Rational>& unit, const JetAssignment& t, int eo,
                      int d_ord) {
    JetAssignment q = t;
    for (int mu = 1; mu <= w.N; ++mu) {
        const Rational& u = unit[static_cast<std::size_t>(mu - 1)];
        if (is_zero(u)) continue;
        auto code = var(mu, 1).code();
        auto it = q.find(code);
        if (it == q.end()) it = q.emplace(code, Jet(eo, d_ord)).first;
        it->second.at(0, 0) -= u;
    }
    return q;
}

}  // namespace

ConeJetModel cone_jet(const TruncatedSeries& F0, const std::vector<Rational>& unit,
                      const std::map<std::uint16_t, Rational>& direction, int jet_order) {
    const Window& w = F0.window();
    if (jet_order < 1 || jet_order > w.D)
        throw std::invalid_argument("jet order must be between 1 and the window degree cap");
    const int eo = jet_order, d_ord = 0;

    ConeJetModel model;
    model.jet_order = jet_order;
    for (const auto& [code, c] : direction) {
        Jet j(eo, d_ord);
        j.at(1, 0) = c;
        model.t_point.emplace(code, std::move(j));
    }
    JetAssignment q = q_point(w, unit, model.t_point, eo, d_ord);
    (void)q;  // p and the frame are evaluated in t-coordinates (dq = dt)

    for (int mu = 1; mu <= w.N; ++mu)
        for (int k = 0; k <= w.K; ++k) {
            Var v = var(mu, k);
            model.p.emplace(v.code(), eval_series_at(F0.derived(v), model.t_point, eo, d_ord));
        }
    for (int mu = 1; mu <= w.N; ++mu)
        for (int k = 0; k <= w.K; ++k)
            for (int nu = 1; nu <= w.N; ++nu)
                for (int m = 0; m <= w.K; ++m) {
                    Var a = var(mu, k), b = var(nu, m);
                    if (b.code() < a.code()) continue;
                    Jet h = eval_series_at(F0.derived(a).derived(b), model.t_point, eo, d_ord);
                    model.hess.emplace(std::make_pair(a.code(), b.code()), h);
                    if (!(a.code() == b.code())) model.hess.emplace(std::make_pair(b.code(), a.code()), h);
                }
    return model;
}

namespace {

struct PhaseVector {
    // Coordinates over the window's (mu, k <= K) range; jets in (eps, delta).
    std::map<std::uint16_t, Jet> q, p;
};

Jet get(const std::map<std::uint16_t, Jet>& m, std::uint16_t code, int eo, int d_ord) {
    auto it = m.find(code);
    return it == m.end() ? Jet(eo, d_ord) : it->second;
}

// z * (p, q): q'_0 = -p_0, q'_{k+1} = q_k, p'_k = -p_{k+1}.
PhaseVector z_shift(const PhaseVector& v, const Window& w, int eo, int d_ord) {
    PhaseVector out;
    for (int mu = 1; mu <= w.N; ++mu) {
        out.q[var(mu, 0).code()] = get(v.p, var(mu, 0).code(), eo, d_ord).scaled(Rational(-1));
        for (int k = 0; k + 1 <= w.K; ++k) out.q[var(mu, k + 1).code()] = get(v.q, var(mu, k).code(), eo, d_ord);
        for (int k = 0; k + 1 <= w.K; ++k)
            out.p[var(mu, k).code()] = get(v.p, var(mu, k + 1).code(), eo, d_ord).scaled(Rational(-1));
        // p'_K falls outside the represented range and stays unchecked.
    }
    return out;
}

}  // namespace

ConeAxiomReport check_cone_axioms(const TruncatedSeries& F0, const std::vector<Rational>& unit,
                                  const std::vector<std::map<std::uint16_t, Rational>>& directions,
                                  int jet_order) {
    const Window& w = F0.window();
    const int eo = jet_order, d_ord = 2;
    ConeAxiomReport rep;
    {
        std::ostringstream os;
        os << "jet order " << jet_order << " in the curve parameter, ruling checked to second order along "
           << "the tangent-frame directions with shift level < " << w.K << "; " << directions.size()
           << " sample points";
        rep.scope = os.str();
    }
    auto witness = [&](const std::string& s) {
        if (rep.witnesses.size() < 16) rep.witnesses.push_back(s);
    };

    // Precompute the second-derivative series once.
    std::map<std::pair<std::uint16_t, std::uint16_t>, TruncatedSeries> hess_series;
    std::vector<std::uint16_t> codes;
    for (int mu = 1; mu <= w.N; ++mu)
        for (int k = 0; k <= w.K; ++k) codes.push_back(var(mu, k).code());
    std::map<std::uint16_t, TruncatedSeries> grad_series;
    for (auto a : codes) grad_series.emplace(a, F0.derived(Var::from_code(a)));
    for (auto a : codes)
        for (auto b : codes) {
            if (b < a) continue;
            TruncatedSeries h = grad_series.at(a).derived(Var::from_code(b));
            hess_series.emplace(std::make_pair(a, b), h);
            if (a != b) hess_series.emplace(std::make_pair(b, a), std::move(h));
        }

    for (std::size_t si = 0; si < directions.size(); ++si) {
        // The sample point as jets in (eps, delta).
        JetAssignment t_pt;
        for (const auto& [code, c] : directions[si]) {
            Jet j(eo, d_ord);
            j.at(1, 0) = c;
            t_pt.emplace(code, std::move(j));
        }
        JetAssignment q_pt = q_point(w, unit, t_pt, eo, d_ord);

        std::map<std::uint16_t, Jet> p_pt, grad_at;
        std::map<std::pair<std::uint16_t, std::uint16_t>, Jet> hess_at;
        for (auto a : codes) p_pt.emplace(a, eval_series_at(grad_series.at(a), t_pt, eo, d_ord));
        for (const auto& [key, hs] : hess_series) hess_at.emplace(key, eval_series_at(hs, t_pt, eo, d_ord));

        // (1) f in T_f L: p = Hess . q at the sample point.
        for (auto a : codes) {
            Jet rhs(eo, d_ord);
            for (auto b : codes) rhs = rhs + hess_at.at({a, b}) * get(q_pt, b, eo, d_ord);
            if (!(rhs == p_pt.at(a))) {
                rep.cone_through_origin = false;
                witness("axiom 1 at sample " + std::to_string(si) + ", coordinate " +
                        Monomial::single(Var::from_code(a)).str() + ": p - Hess.q = " +
                        (p_pt.at(a) - rhs).str());
                break;
            }
        }

        // Tangent-frame directions v = T_b with shift staying in range.
        for (auto b : codes) {
            Var vb = Var::from_code(b);
            if (vb.k + 1 > w.K) continue;
            PhaseVector v;
            Jet one = Jet::constant(eo, d_ord, Rational(1));
            v.q[b] = one;
            for (auto a : codes) v.p[a] = hess_at.at({a, b});
            PhaseVector zv = z_shift(v, w, eo, d_ord);

            // (2) z v in T_f L: (zv)_p = Hess . (zv)_q on rows with k < K.
            for (auto a : codes) {
                if (Var::from_code(a).k + 1 > w.K) continue;
                Jet rhs(eo, d_ord);
                for (auto cdd : codes) rhs = rhs + hess_at.at({a, cdd}) * get(zv.q, cdd, eo, d_ord);
                if (!(rhs == get(zv.p, a, eo, d_ord))) {
                    rep.z_stabilizes_tangent = false;
                    witness("axiom 2 at sample " + std::to_string(si) + ", direction " +
                            Monomial::single(vb).str() + ", row " +
                            Monomial::single(Var::from_code(a)).str());
                    break;
                }
            }

            // (3) the ruling point f + delta * z v lies in L: p = dF0(q) there.
            JetAssignment t_rul = t_pt;
            for (auto cdd : codes) {
                Jet dq = get(zv.q, cdd, eo, d_ord);
                if (dq.is_zero()) continue;
                Jet bump(eo, d_ord);
                for (int i = 0; i <= eo; ++i)
                    for (int j = 0; j + 1 <= d_ord; ++j) bump.at(i, j + 1) = dq.at(i, j);
                auto it = t_rul.find(cdd);
                if (it == t_rul.end())
                    t_rul.emplace(cdd, bump);
                else
                    it->second = it->second + bump;
            }
            bool ok3 = true;
            for (auto a : codes) {
                if (Var::from_code(a).k + 1 > w.K) continue;
                Jet want = p_pt.at(a);
                Jet dp = get(zv.p, a, eo, d_ord);
                Jet bump(eo, d_ord);
                for (int i = 0; i <= eo; ++i)
                    for (int j = 0; j + 1 <= d_ord; ++j) bump.at(i, j + 1) = dp.at(i, j);
                want = want + bump;
                Jet have = eval_series_at(grad_series.at(a), t_rul, eo, d_ord);
                if (!(want == have)) {
                    rep.ruling_in_cone = false;
                    ok3 = false;
                    witness("axiom 3 at sample " + std::to_string(si) + ", direction " +
                            Monomial::single(vb).str() + ", coordinate " +
                            Monomial::single(Var::from_code(a)).str());
                    break;
                }
            }
            (void)ok3;

            // (4) the tangent frame is unchanged along the ruling.
            for (auto a : codes) {
                bool done = false;
                for (auto cdd : codes) {
                    Jet h0 = hess_at.at({a, cdd});
                    Jet h1 = eval_series_at(hess_series.at({a, cdd}), t_rul, eo, d_ord);
                    if (!(h0 == h1)) {
                        rep.tangent_constant_on_ruling = false;
                        witness("axiom 4 at sample " + std::to_string(si) + ", direction " +
                                Monomial::single(vb).str() + ", entry (" +
                                Monomial::single(Var::from_code(a)).str() + "," +
                                Monomial::single(Var::from_code(cdd)).str() + ")");
                        done = true;
                        break;
                    }
                }
                if (done) break;
            }
        }
    }
    return rep;
}

}  // namespace loopfock
