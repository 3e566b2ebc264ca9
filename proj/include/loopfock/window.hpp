#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace loopfock {

// A formal variable t^mu_k: direction mu in [1..N], descendent level k >= 0.
struct Var {
    std::uint8_t mu = 1;
    std::uint8_t k = 0;

    constexpr std::uint16_t code() const {
        return static_cast<std::uint16_t>((mu << 8) | k);
    }
    static constexpr Var from_code(std::uint16_t c) {
        return Var{static_cast<std::uint8_t>(c >> 8), static_cast<std::uint8_t>(c & 0xff)};
    }
    friend constexpr bool operator==(Var a, Var b) { return a.code() == b.code(); }
    friend constexpr bool operator<(Var a, Var b) { return a.code() < b.code(); }
};

inline Var var(int mu, int k) {
    if (mu < 1 || mu > 255 || k < 0 || k > 255) throw std::out_of_range("variable index out of range");
    return Var{static_cast<std::uint8_t>(mu), static_cast<std::uint8_t>(k)};
}

// Truncation window. A monomial is inside iff every variable has
// mu in [1..N], k in [0..K], total degree <= D and level-sum <= L.
// G bounds the genus components carried alongside.
struct Window {
    int N = 1;
    int K = 0;
    int D = 0;
    int G = 0;
    int L = 0;

    Window() = default;
    Window(int N_, int K_, int D_, int G_, int L_ = -1)
        : N(N_), K(K_), D(D_), G(G_), L(L_ < 0 ? default_level_sum_cap(G_, D_) : L_) {
        if (N < 1 || K < 0 || D < 0 || G < 0 || L < 0)
            throw std::invalid_argument("window bounds must be nonnegative (N >= 1)");
        if (N > 255 || K > 250) throw std::invalid_argument("window bounds too large for index encoding");
    }

    // Largest level-sum attainable under the dimension constraint
    // sum k = 3g - 3 + n with g <= G, n <= D.
    static int default_level_sum_cap(int G_, int D_) { return std::max(0, 3 * G_ - 3 + D_); }

    bool contains(Var v) const { return v.mu >= 1 && v.mu <= N && v.k <= K; }

    friend bool operator==(const Window& a, const Window& b) {
        return a.N == b.N && a.K == b.K && a.D == b.D && a.G == b.G && a.L == b.L;
    }
};

// Multiset of variables, kept sorted by (mu,k) code.
class Monomial {
  public:
    Monomial() = default;
    explicit Monomial(std::vector<std::uint16_t> codes) : codes_(std::move(codes)) {
        std::sort(codes_.begin(), codes_.end());
    }

    static Monomial one() { return Monomial(); }
    static Monomial single(Var v) { return Monomial({v.code()}); }

    int degree() const { return static_cast<int>(codes_.size()); }
    int level_sum() const {
        int s = 0;
        for (auto c : codes_) s += c & 0xff;
        return s;
    }
    int max_level() const {
        int m = 0;
        for (auto c : codes_) m = std::max(m, int(c & 0xff));
        return m;
    }
    bool empty() const { return codes_.empty(); }

    const std::vector<std::uint16_t>& codes() const { return codes_; }
    Var at(int i) const { return Var::from_code(codes_[static_cast<std::size_t>(i)]); }

    int count(Var v) const {
        auto [lo, hi] = std::equal_range(codes_.begin(), codes_.end(), v.code());
        return static_cast<int>(hi - lo);
    }

    Monomial with(Var v) const {
        auto c = codes_;
        c.insert(std::upper_bound(c.begin(), c.end(), v.code()), v.code());
        Monomial m;
        m.codes_ = std::move(c);
        return m;
    }
    // Removes one occurrence; caller must ensure count(v) > 0.
    Monomial without(Var v) const {
        auto c = codes_;
        c.erase(std::lower_bound(c.begin(), c.end(), v.code()));
        Monomial m;
        m.codes_ = std::move(c);
        return m;
    }
    Monomial merged(const Monomial& o) const {
        std::vector<std::uint16_t> c;
        c.reserve(codes_.size() + o.codes_.size());
        std::merge(codes_.begin(), codes_.end(), o.codes_.begin(), o.codes_.end(), std::back_inserter(c));
        Monomial m;
        m.codes_ = std::move(c);
        return m;
    }

    bool inside(const Window& w) const {
        if (degree() > w.D || level_sum() > w.L) return false;
        for (auto c : codes_) {
            Var v = Var::from_code(c);
            if (!w.contains(v)) return false;
        }
        return true;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.codes_ == b.codes_; }
    friend bool operator<(const Monomial& a, const Monomial& b) { return a.codes_ < b.codes_; }

    std::string str() const;

  private:
    std::vector<std::uint16_t> codes_;
};

// Canonical ordering used for serialization: (degree, level-sum, indices).
struct CanonicalMonomialLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.degree() != b.degree()) return a.degree() < b.degree();
        if (a.level_sum() != b.level_sum()) return a.level_sum() < b.level_sum();
        return a.codes() < b.codes();
    }
};

// Every monomial inside the window (including the empty one), in a
// deterministic order. Size grows quickly; meant for small windows.
std::vector<Monomial> all_monomials(const Window& w);

inline std::string Monomial::str() const {
    if (codes_.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < codes_.size(); ++i) {
        Var v = Var::from_code(codes_[i]);
        if (i) s += "*";
        s += "t[" + std::to_string(v.mu) + "," + std::to_string(int(v.k)) + "]";
    }
    return s;
}

}  // namespace loopfock
