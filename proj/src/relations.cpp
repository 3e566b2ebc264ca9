#include "loopfock/relations.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "loopfock/quantize.hpp"
#include "loopfock/vertex.hpp"

namespace loopfock {

// --- Lexer / parser -------------------------------------------------------

namespace {

struct Token {
    enum class Kind { ident, number, punct, end };
    Kind kind = Kind::end;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : s_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(tok_.line, tok_.col, msg); }

  private:
    void advance() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '#') {  // comment to end of line
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
                continue;
            }
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++col_;
                ++pos_;
                continue;
            }
            break;
        }
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::Kind::end;
            tok_.text.clear();
            return;
        }
        char c = s_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            tok_.kind = Token::Kind::ident;
            tok_.text = s_.substr(start, pos_ - start);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            tok_.kind = Token::Kind::number;
            tok_.text = s_.substr(start, pos_ - start);
        } else {
            tok_.kind = Token::Kind::punct;
            tok_.text = std::string(1, c);
            ++pos_;
        }
        col_ += static_cast<int>(pos_ - (tok_.col >= 0 ? pos_ - tok_.text.size() : 0));
        col_ = tok_.col + static_cast<int>(tok_.text.size());
    }

    std::string s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

class RelationParser {
  public:
    explicit RelationParser(const std::string& text) : lex_(text) {}

    Relation parse() {
        expect_ident("relation");
        rel_.name = expect(Token::Kind::ident, "relation name").text;
        expect_ident("genus");
        rel_.genus = expect_int("genus label");
        if (rel_.genus < 0) fail_prev("genus label must be nonnegative");
        expect_punct(";");
        if (lex_.peek().kind == Token::Kind::ident && lex_.peek().text == "free") parse_free();
        while (lex_.peek().kind == Token::Kind::ident && lex_.peek().text == "term") parse_term();
        if (lex_.peek().kind != Token::Kind::end) lex_.fail("expected 'term' or end of input");
        if (rel_.terms.empty()) lex_.fail("no terms");
        return rel_;
    }

  private:
    void parse_free() {
        lex_.take();
        while (lex_.peek().kind == Token::Kind::ident) {
            FreeSlot slot;
            slot.name = lex_.take().text;
            expect_punct(":");
            slot.level_name = expect(Token::Kind::ident, "level variable name").text;
            for (const auto& s : rel_.free_slots)
                if (s.name == slot.name || s.level_name == slot.level_name)
                    fail_prev("duplicate free slot name '" + slot.name + "'");
            rel_.free_slots.push_back(std::move(slot));
        }
        expect_punct(";");
        if (rel_.free_slots.empty()) fail_prev("empty free clause");
    }

    void parse_term() {
        lex_.take();
        Term term;
        term.coeff = parse_coeff();
        while (lex_.peek().kind == Token::Kind::ident &&
               (lex_.peek().text == "sum" || lex_.peek().text == "sumlevel")) {
            bool is_dir = lex_.take().text == "sum";
            std::string name = expect(Token::Kind::ident, "binder name").text;
            auto& list = is_dir ? term.contracted : term.sumlevels;
            list.push_back(name);
        }
        term.factors.push_back(parse_factor(term));
        while (lex_.peek().kind == Token::Kind::punct && lex_.peek().text == "*") {
            lex_.take();
            term.factors.push_back(parse_factor(term));
        }
        expect_punct(";");
        check_contractions(term);
        rel_.terms.push_back(std::move(term));
    }

    Factor parse_factor(const Term& term) {
        Token head = expect(Token::Kind::ident, "factor ('corr' or 'var')");
        Factor f;
        if (head.text == "corr") {
            f.kind = Factor::Kind::correlator;
            expect_punct("(");
            f.genus = expect_int("genus label");
            if (f.genus < 0) fail_prev("genus label must be nonnegative");
            expect_punct(";");
            if (!(lex_.peek().kind == Token::Kind::punct && lex_.peek().text == ")")) {
                f.ins.push_back(parse_spec(term));
                while (lex_.peek().kind == Token::Kind::punct && lex_.peek().text == ",") {
                    lex_.take();
                    f.ins.push_back(parse_spec(term));
                }
            }
            expect_punct(")");
        } else if (head.text == "var") {
            f.kind = Factor::Kind::variable;
            expect_punct("(");
            f.ins.push_back(parse_spec(term));
            expect_punct(")");
        } else {
            throw ParseError(head.line, head.col, "expected 'corr' or 'var', got '" + head.text + "'");
        }
        return f;
    }

    InsSpec parse_spec(const Term& term) {
        Token name = expect(Token::Kind::ident, "insertion spec");
        InsSpec spec;
        if (lex_.peek().kind == Token::Kind::punct && lex_.peek().text == ":") {
            lex_.take();
            if (name.text == "unit") {
                spec.dir.base = DirExpr::Base::unit;
            } else {
                spec.dir.base = DirExpr::Base::contracted;
                spec.dir.index = contracted_index(term, name);
            }
            spec.level = parse_level_expr(term);
            return spec;
        }
        // Free slot reference with optional level offset.
        spec.dir.base = DirExpr::Base::slot;
        spec.dir.index = slot_index(name);
        spec.level.base = LevelExpr::Base::slot;
        spec.level.index = spec.dir.index;
        spec.level.offset = parse_offset();
        return spec;
    }

    LevelExpr parse_level_expr(const Term& term) {
        LevelExpr e;
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::number) {
            e.base = LevelExpr::Base::constant;
            e.offset = expect_int("level");
            return e;
        }
        Token name = expect(Token::Kind::ident, "level expression");
        auto it = std::find(term.sumlevels.begin(), term.sumlevels.end(), name.text);
        if (it != term.sumlevels.end()) {
            e.base = LevelExpr::Base::sumlevel;
            e.index = static_cast<int>(it - term.sumlevels.begin());
        } else {
            // Fall back to a free slot's level variable.
            bool found = false;
            for (std::size_t i = 0; i < rel_.free_slots.size(); ++i)
                if (rel_.free_slots[i].level_name == name.text) {
                    e.base = LevelExpr::Base::slot;
                    e.index = static_cast<int>(i);
                    found = true;
                }
            if (!found)
                throw ParseError(name.line, name.col, "unbound level name '" + name.text + "'");
        }
        e.offset = parse_offset();
        return e;
    }

    int parse_offset() {
        if (lex_.peek().kind == Token::Kind::punct &&
            (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            bool neg = lex_.take().text == "-";
            int v = expect_int("level offset");
            return neg ? -v : v;
        }
        return 0;
    }

    Rational parse_coeff() {
        bool neg = false;
        if (lex_.peek().kind == Token::Kind::punct &&
            (lex_.peek().text == "-" || lex_.peek().text == "+"))
            neg = lex_.take().text == "-";
        long num = expect_int("coefficient");
        long den = 1;
        if (lex_.peek().kind == Token::Kind::punct && lex_.peek().text == "/") {
            lex_.take();
            den = expect_int("denominator");
            if (den == 0) fail_prev("zero denominator");
        }
        return rat(neg ? -num : num, den);
    }

    int slot_index(const Token& name) {
        for (std::size_t i = 0; i < rel_.free_slots.size(); ++i)
            if (rel_.free_slots[i].name == name.text) return static_cast<int>(i);
        throw ParseError(name.line, name.col,
                         "unknown slot or unbound contracted index '" + name.text + "'");
    }

    int contracted_index(const Term& term, const Token& name) {
        auto it = std::find(term.contracted.begin(), term.contracted.end(), name.text);
        if (it == term.contracted.end())
            throw ParseError(name.line, name.col, "unbound contracted index '" + name.text + "'");
        return static_cast<int>(it - term.contracted.begin());
    }

    void check_contractions(const Term& term) {
        std::vector<int> uses(term.contracted.size(), 0);
        for (const auto& f : term.factors)
            for (const auto& s : f.ins)
                if (s.dir.base == DirExpr::Base::contracted) ++uses[static_cast<std::size_t>(s.dir.index)];
        for (std::size_t i = 0; i < uses.size(); ++i)
            if (uses[i] != 2)
                fail_prev("contracted index '" + term.contracted[i] + "' must appear exactly twice, found " +
                          std::to_string(uses[i]));
        std::vector<int> lvl_uses(term.sumlevels.size(), 0);
        for (const auto& f : term.factors)
            for (const auto& s : f.ins)
                if (s.level.base == LevelExpr::Base::sumlevel) ++lvl_uses[static_cast<std::size_t>(s.level.index)];
        for (std::size_t i = 0; i < lvl_uses.size(); ++i)
            if (lvl_uses[i] == 0) fail_prev("summed level '" + term.sumlevels[i] + "' is never used");
    }

    Token expect(Token::Kind kind, const std::string& what) {
        if (lex_.peek().kind != kind) lex_.fail("expected " + what);
        return lex_.take();
    }
    void expect_ident(const std::string& word) {
        Token t = expect(Token::Kind::ident, "'" + word + "'");
        if (t.text != word) throw ParseError(t.line, t.col, "expected '" + word + "', got '" + t.text + "'");
    }
    void expect_punct(const std::string& p) {
        if (lex_.peek().kind != Token::Kind::punct || lex_.peek().text != p) lex_.fail("expected '" + p + "'");
        lex_.take();
    }
    int expect_int(const std::string& what) {
        Token t = expect(Token::Kind::number, what);
        return std::stoi(t.text);
    }
    [[noreturn]] void fail_prev(const std::string& msg) { lex_.fail(msg); }

    Lexer lex_;
    Relation rel_;
};

}  // namespace

Relation parse_relation(const std::string& text) { return RelationParser(text).parse(); }

namespace {

std::string level_expr_str(const Relation& r, const Term& t, const LevelExpr& e) {
    std::string base;
    switch (e.base) {
        case LevelExpr::Base::constant: return std::to_string(e.offset);
        case LevelExpr::Base::slot: base = r.free_slots[static_cast<std::size_t>(e.index)].level_name; break;
        case LevelExpr::Base::sumlevel: base = t.sumlevels[static_cast<std::size_t>(e.index)]; break;
    }
    if (e.offset > 0) return base + "+" + std::to_string(e.offset);
    if (e.offset < 0) return base + "-" + std::to_string(-e.offset);
    return base;
}

std::string spec_str(const Relation& r, const Term& t, const InsSpec& s) {
    switch (s.dir.base) {
        case DirExpr::Base::slot: {
            std::string base = r.free_slots[static_cast<std::size_t>(s.dir.index)].name;
            if (s.level.offset > 0) return base + "+" + std::to_string(s.level.offset);
            if (s.level.offset < 0) return base + "-" + std::to_string(-s.level.offset);
            return base;
        }
        case DirExpr::Base::contracted:
            return t.contracted[static_cast<std::size_t>(s.dir.index)] + ":" + level_expr_str(r, t, s.level);
        case DirExpr::Base::unit:
            return "unit:" + level_expr_str(r, t, s.level);
    }
    return "?";
}

}  // namespace

std::string serialize_relation(const Relation& r) {
    std::ostringstream os;
    os << "relation " << r.name << " genus " << r.genus << ";\n";
    if (!r.free_slots.empty()) {
        os << "free";
        for (const auto& s : r.free_slots) os << " " << s.name << ":" << s.level_name;
        os << ";\n";
    }
    for (const auto& t : r.terms) {
        os << "term " << rat_to_string(t.coeff);
        for (const auto& u : t.contracted) os << " sum " << u;
        for (const auto& n : t.sumlevels) os << " sumlevel " << n;
        bool first = true;
        for (const auto& f : t.factors) {
            os << (first ? " " : " * ");
            first = false;
            if (f.kind == Factor::Kind::correlator) {
                os << "corr(" << f.genus << ";";
                for (std::size_t i = 0; i < f.ins.size(); ++i)
                    os << (i ? ", " : " ") << spec_str(r, t, f.ins[i]);
                os << ")";
            } else {
                os << "var(" << spec_str(r, t, f.ins[0]) << ")";
            }
        }
        os << ";\n";
    }
    return os.str();
}

// --- Built-ins ------------------------------------------------------------

namespace {

const std::map<std::string, std::string>& builtin_texts() {
    static const std::map<std::string, std::string> texts = {
        {"SE",
         "relation SE genus 0;\n"
         "term 1 corr(0; unit:0);\n"
         "term -1/2 sum u var(u:0) * var(u:0);\n"
         "term -1 sum u sumlevel n var(u:n+1) * corr(0; u:n);\n"},
        {"DE",
         "relation DE genus 0;\n"
         "term 1 corr(0; unit:1);\n"
         "term -1 sum u sumlevel n var(u:n) * corr(0; u:n);\n"
         "term 2 corr(0;);\n"},
        {"TRR",
         "relation TRR genus 0;\n"
         "free a:k b:l c:m;\n"
         "term 1 corr(0; a+1, b, c);\n"
         "term -1 sum u corr(0; a, u:0) * corr(0; u:0, b, c);\n"},
        {"TRR1",
         "relation TRR1 genus 1;\n"
         "free a:k;\n"
         "term 1 corr(1; a+1);\n"
         "term -1 sum u corr(0; a, u:0) * corr(1; u:0);\n"
         "term -1/24 sum u corr(0; a, u:0, u:0);\n"},
    };
    return texts;
}

}  // namespace

const std::vector<std::string>& builtin_relation_names() {
    static const std::vector<std::string> names = {"SE", "DE", "TRR", "TRR1"};
    return names;
}

const std::string& builtin_relation_text(const std::string& name) {
    auto it = builtin_texts().find(name);
    if (it == builtin_texts().end()) throw std::invalid_argument("unknown built-in relation '" + name + "'");
    return it->second;
}

const Relation& builtin_relation(const std::string& name) {
    static std::map<std::string, Relation> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, parse_relation(builtin_relation_text(name))).first;
    return it->second;
}

// --- Evaluation -------------------------------------------------------------

namespace {

int eval_level(const LevelExpr& e, const std::vector<SlotAssignment>& slots, const std::vector<int>& sumlv) {
    switch (e.base) {
        case LevelExpr::Base::constant: return e.offset;
        case LevelExpr::Base::slot: return slots[static_cast<std::size_t>(e.index)].level + e.offset;
        case LevelExpr::Base::sumlevel: return sumlv[static_cast<std::size_t>(e.index)] + e.offset;
    }
    return 0;
}

struct DirChoice {
    int mu;
    Rational weight;
};

std::vector<DirChoice> eval_dir(const DirExpr& d, const Potential& p,
                                const std::vector<SlotAssignment>& slots, const std::vector<int>& contr) {
    switch (d.base) {
        case DirExpr::Base::slot:
            return {{slots[static_cast<std::size_t>(d.index)].mu, Rational(1)}};
        case DirExpr::Base::contracted:
            return {{contr[static_cast<std::size_t>(d.index)], Rational(1)}};
        case DirExpr::Base::unit: {
            std::vector<DirChoice> out;
            for (int mu = 1; mu <= p.window.N; ++mu)
                if (!is_zero(p.unit[static_cast<std::size_t>(mu - 1)]))
                    out.push_back({mu, p.unit[static_cast<std::size_t>(mu - 1)]});
            return out;
        }
    }
    return {};
}

// Contribution of one term with all binders fixed. A level outside [0, K]
// makes the combination vanish under truncation and is skipped.
void add_term_combination(const Term& term, const Potential& p, const std::vector<SlotAssignment>& slots,
                          const std::vector<int>& contr, const std::vector<int>& sumlv,
                          TruncatedSeries& out) {
    std::vector<TruncatedSeries> corr_series;
    std::vector<std::vector<std::pair<Var, Rational>>> var_choices;
    for (const auto& f : term.factors) {
        std::vector<std::vector<std::pair<Var, Rational>>> per_ins;
        for (const auto& s : f.ins) {
            int lvl = eval_level(s.level, slots, sumlv);
            if (lvl < 0 || lvl > p.window.K) return;
            std::vector<std::pair<Var, Rational>> choices;
            for (const auto& dc : eval_dir(s.dir, p, slots, contr))
                choices.emplace_back(var(dc.mu, lvl), dc.weight);
            if (choices.empty()) return;
            per_ins.push_back(std::move(choices));
        }
        if (f.kind == Factor::Kind::correlator) {
            TruncatedSeries fs(p.window);
            std::vector<std::size_t> pick(per_ins.size(), 0);
            std::function<void(std::size_t, Rational)> walk = [&](std::size_t j, Rational wgt) {
                if (j == per_ins.size()) {
                    TruncatedSeries d = p.F[static_cast<std::size_t>(f.genus)];
                    for (std::size_t q = 0; q < per_ins.size(); ++q)
                        d = d.derived(per_ins[q][pick[q]].first);
                    if (!d.is_zero()) fs = fs + d.scaled(wgt);
                    return;
                }
                for (std::size_t c = 0; c < per_ins[j].size(); ++c) {
                    pick[j] = c;
                    walk(j + 1, wgt * per_ins[j][c].second);
                }
            };
            walk(0, Rational(1));
            if (fs.is_zero()) return;
            corr_series.push_back(std::move(fs));
        } else {
            var_choices.push_back(std::move(per_ins[0]));
        }
    }
    TruncatedSeries prod = TruncatedSeries::constant(p.window, term.coeff);
    for (const auto& fs : corr_series) {
        prod = prod * fs;
        if (prod.is_zero()) return;
    }
    for (const auto& vc : var_choices) {
        TruncatedSeries next(p.window);
        for (const auto& [v, wgt] : vc) next = next + prod.times_var(v).scaled(wgt);
        prod = std::move(next);
        if (prod.is_zero()) return;
    }
    out = out + prod;
}

void check_genus_labels(const Relation& rel, const Potential& p) {
    for (const auto& t : rel.terms)
        for (const auto& f : t.factors)
            if (f.kind == Factor::Kind::correlator && f.genus > p.window.G)
                throw std::domain_error("insufficient window: relation '" + rel.name +
                                        "' references genus " + std::to_string(f.genus) +
                                        " but the window has G = " + std::to_string(p.window.G));
}

// Conservative certification that the residual coefficient at M only pulled
// potential data inside the guaranteed-exact region. The pulled strata are
// over-approximated by sub-monomial envelopes plus worst-case insertion
// levels.
bool certified_coefficient(const Relation& rel, const Potential& p, const Monomial& M, int cap) {
    std::vector<int> levels;
    for (int i = 0; i < M.degree(); ++i) levels.push_back(M.at(i).k);
    std::sort(levels.begin(), levels.end());
    const int n = M.degree();
    std::vector<int> pre_small(static_cast<std::size_t>(n) + 1, 0), pre_large(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 0; i < n; ++i) pre_small[static_cast<std::size_t>(i + 1)] = pre_small[static_cast<std::size_t>(i)] + levels[static_cast<std::size_t>(i)];
    for (int i = 0; i < n; ++i) pre_large[static_cast<std::size_t>(i + 1)] = pre_large[static_cast<std::size_t>(i)] + levels[static_cast<std::size_t>(n - 1 - i)];

    for (const auto& term : rel.terms) {
        for (const auto& f : term.factors) {
            if (f.kind != Factor::Kind::correlator) continue;
            int e_d = static_cast<int>(f.ins.size());
            int e_s = 0, e_k = 0;
            for (const auto& s : f.ins) {
                int worst = (s.level.base == LevelExpr::Base::constant) ? s.level.offset : cap;
                e_s += worst;
                e_k = std::max(e_k, worst);
            }
            const int k_hi = std::max(M.max_level(), e_k);
            for (int a = 0; a <= n; ++a) {
                for (int b = pre_small[static_cast<std::size_t>(a)]; b <= pre_large[static_cast<std::size_t>(a)]; ++b) {
                    const int d = a + e_d, s = b + e_s;
                    if (p.exact.knows_zero(f.genus, d, s)) continue;
                    if (!p.exact.exact_at(f.genus, d, s, k_hi)) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace

TruncatedSeries evaluate_relation_at(const Relation& rel, const Potential& p,
                                     const std::vector<SlotAssignment>& assignment) {
    if (assignment.size() != rel.free_slots.size())
        throw std::invalid_argument("assignment arity mismatch (relation has " +
                                    std::to_string(rel.free_slots.size()) + " free slots)");
    check_genus_labels(rel, p);
    TruncatedSeries residual(p.window);
    for (const auto& term : rel.terms) {
        std::vector<int> contr(term.contracted.size(), 1);
        std::vector<int> sumlv(term.sumlevels.size(), 0);
        // Bounds for summed levels from their usages.
        std::vector<std::pair<int, int>> lv_range(term.sumlevels.size(), {0, p.window.K});
        for (const auto& f : term.factors)
            for (const auto& s : f.ins)
                if (s.level.base == LevelExpr::Base::sumlevel) {
                    auto& r = lv_range[static_cast<std::size_t>(s.level.index)];
                    r.first = std::max(r.first, -s.level.offset);
                    r.second = std::min(r.second, p.window.K - s.level.offset);
                }
        std::function<void(std::size_t)> rec_levels = [&](std::size_t i) {
            if (i < sumlv.size()) {
                for (int v = lv_range[i].first; v <= lv_range[i].second; ++v) {
                    sumlv[i] = v;
                    rec_levels(i + 1);
                }
                return;
            }
            add_term_combination(term, p, assignment, contr, sumlv, residual);
        };
        std::function<void(std::size_t)> rec_dirs = [&](std::size_t i) {
            if (i < contr.size()) {
                for (int mu = 1; mu <= p.window.N; ++mu) {
                    contr[i] = mu;
                    rec_dirs(i + 1);
                }
                return;
            }
            rec_levels(0);
        };
        rec_dirs(0);
    }
    return residual;
}

RelationReport evaluate_relation(const Relation& rel, const Potential& p, int level_cap) {
    check_genus_labels(rel, p);
    const int cap = level_cap < 0 ? p.window.K : level_cap;
    RelationReport rep;
    rep.relation = rel.name;
    {
        std::ostringstream os;
        os << "exact region: history=" << ExactRegion::history_name(p.exact.history)
           << " weight=" << p.exact.weight_budget << " build window N=" << p.exact.build.N
           << " K=" << p.exact.build.K << " D=" << p.exact.build.D << " G=" << p.exact.build.G
           << " L=" << p.exact.build.L;
        rep.exact_region_note = os.str();
    }

    // Admissible free-slot level ranges: every usage keeps its level in [0, cap].
    const std::size_t ns = rel.free_slots.size();
    std::vector<int> lo(ns, 0), hi(ns, cap);
    for (const auto& t : rel.terms)
        for (const auto& f : t.factors)
            for (const auto& s : f.ins)
                if (s.level.base == LevelExpr::Base::slot) {
                    auto i = static_cast<std::size_t>(s.level.index);
                    lo[i] = std::max(lo[i], -s.level.offset);
                    hi[i] = std::min(hi[i], cap - s.level.offset);
                }

    bool any_certified = false;
    std::vector<SlotAssignment> asg(ns);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i < ns) {
            for (int mu = 1; mu <= p.window.N; ++mu)
                for (int lvl = lo[i]; lvl <= hi[i]; ++lvl) {
                    asg[i] = SlotAssignment{mu, lvl};
                    rec(i + 1);
                }
            return;
        }
        ++rep.assignments;
        TruncatedSeries residual = evaluate_relation_at(rel, p, asg);
        for (const auto& [key, c] : residual.terms()) {
            if (certified_coefficient(rel, p, key.mono, cap)) {
                rep.pass = false;
                if (rep.failures.size() < 32)
                    rep.failures.push_back(ResidualFailure{asg, key.mono, c, true});
            } else {
                ++rep.nonzero_uncertified;
            }
        }
        if (!any_certified && certified_coefficient(rel, p, Monomial::one(), cap)) any_certified = true;
    };
    rec(0);

    if (!any_certified)
        throw std::domain_error(
            "insufficient window for relation '" + rel.name +
            "': no residual coefficient is inside the guaranteed-exact region; enlarge the build window "
            "(degree and level caps) relative to the asserted one");
    return rep;
}

// --- Invariance pipeline -----------------------------------------------------

InvarianceReport check_relations(const std::vector<Relation>& rels, const Potential& p,
                                 const InvarianceOptions& opts) {
    InvarianceReport rep;
    for (const auto& rel : rels) {
        rep.relations.push_back(evaluate_relation(rel, p, opts.level_cap));
        rep.pass = rep.pass && rep.relations.back().pass;
    }
    return rep;
}

InvarianceReport check_invariance(const std::vector<Relation>& rels,
                                  const std::vector<LoopAlgebraElement>& elements, const Window& w,
                                  const InvarianceOptions& opts) {
    Potential p = product_vertex(w);
    std::ostringstream note;
    note << "pipeline: product_vertex";
    for (const auto& e : elements) {
        p = act_on_potential(e, p);
        note << " -> exp(" << (e.pure_upper() ? "upper" : e.pure_lower() ? "lower" : "general") << " l_max="
             << e.l_max() << ")";
    }
    InvarianceReport rep = check_relations(rels, p, opts);
    rep.pipeline_note = note.str();
    return rep;
}

}  // namespace loopfock
