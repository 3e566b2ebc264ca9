#include "loopfock/json_io.hpp"

#include <json.hpp>

#include <algorithm>

namespace loopfock {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

namespace {

ordered window_json(const Window& w) {
    ordered j;
    j["N"] = w.N;
    j["K"] = w.K;
    j["D"] = w.D;
    j["G"] = w.G;
    j["L"] = w.L;
    return j;
}

Window window_parse(const json& j) {
    return Window(j.at("N").get<int>(), j.at("K").get<int>(), j.at("D").get<int>(), j.at("G").get<int>(),
                  j.at("L").get<int>());
}

ordered series_json(const TruncatedSeries& s) {
    ordered j;
    j["window"] = window_json(s.window());
    // Canonical ordering: (degree, level-sum, indices), then grade.
    std::vector<const TruncatedSeries::TermMap::value_type*> entries;
    for (const auto& e : s.terms()) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) {
        CanonicalMonomialLess less;
        if (!(a->first.mono == b->first.mono)) return less(a->first.mono, b->first.mono);
        return a->first.hbar < b->first.hbar;
    });
    ordered terms = ordered::array();
    for (auto* e : entries) {
        ordered t;
        ordered mono = ordered::array();
        for (int i = 0; i < e->first.mono.degree(); ++i) {
            Var v = e->first.mono.at(i);
            mono.push_back(ordered::array({v.mu, v.k}));
        }
        t["mono"] = std::move(mono);
        t["coeff"] = rat_to_string(e->second);
        if (e->first.hbar != 0) t["hbar"] = e->first.hbar;
        terms.push_back(std::move(t));
    }
    j["terms"] = std::move(terms);
    return j;
}

TruncatedSeries series_parse(const json& j, int hbar_lo, int hbar_hi) {
    Window w = window_parse(j.at("window"));
    int lo = hbar_lo, hi = hbar_hi;
    for (const auto& t : j.at("terms")) {
        int h = t.value("hbar", 0);
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    TruncatedSeries s(w, lo, hi);
    for (const auto& t : j.at("terms")) {
        std::vector<std::uint16_t> codes;
        for (const auto& mk : t.at("mono"))
            codes.push_back(var(mk.at(0).get<int>(), mk.at(1).get<int>()).code());
        Monomial m(std::move(codes));
        if (!m.inside(w)) throw std::invalid_argument("series term outside its window: " + m.str());
        Rational c = rat_from_string(t.at("coeff").get<std::string>());
        s.accumulate(m, c, t.value("hbar", 0));
    }
    return s;
}

}  // namespace

std::string window_to_json(const Window& w) { return window_json(w).dump(); }

Window window_from_json(const std::string& text) { return window_parse(json::parse(text)); }

std::string series_to_json(const TruncatedSeries& s) { return series_json(s).dump(); }

TruncatedSeries series_from_json(const std::string& text) { return series_parse(json::parse(text), 0, 0); }

std::string potential_to_json(const Potential& p) {
    ordered j;
    j["window"] = window_json(p.window);
    ordered unit = ordered::array();
    for (const auto& u : p.unit) unit.push_back(rat_to_string(u));
    j["unit"] = std::move(unit);
    ordered F = ordered::array();
    for (const auto& f : p.F) F.push_back(series_json(f));
    j["F"] = std::move(F);
    return j.dump(2) + "\n";
}

Potential potential_from_json(const std::string& text) {
    json j = json::parse(text);
    Window w = window_parse(j.at("window"));
    std::vector<Rational> unit;
    for (const auto& u : j.at("unit")) unit.push_back(rat_from_string(u.get<std::string>()));
    Potential p(w, std::move(unit));
    const auto& F = j.at("F");
    if (static_cast<int>(F.size()) != w.G + 1)
        throw std::invalid_argument("potential must carry G+1 components");
    for (int g = 0; g <= w.G; ++g) {
        TruncatedSeries s = series_parse(F.at(static_cast<std::size_t>(g)), 0, 0);
        if (!(s.window() == w)) throw std::invalid_argument("component window mismatch");
        p.F[static_cast<std::size_t>(g)] = std::move(s);
    }
    return p;
}

std::string element_to_json(const LoopAlgebraElement& e) {
    ordered j;
    j["N"] = e.N;
    switch (e.kind) {
        case LoopAlgebraElement::Kind::lower: j["kind"] = "lower"; break;
        case LoopAlgebraElement::Kind::upper: j["kind"] = "upper"; break;
        case LoopAlgebraElement::Kind::general: j["kind"] = "general"; break;
    }
    ordered mats = ordered::array();
    for (const auto& [p, M] : e.by_power) {
        ordered entry;
        entry["l"] = (e.kind == LoopAlgebraElement::Kind::lower) ? -p : p;
        ordered rows = ordered::array();
        for (int i = 0; i < e.N; ++i) {
            ordered row = ordered::array();
            for (int k = 0; k < e.N; ++k) row.push_back(rat_to_string(M.at(i, k)));
            rows.push_back(std::move(row));
        }
        entry["m"] = std::move(rows);
        mats.push_back(std::move(entry));
    }
    j["matrices"] = std::move(mats);
    return j.dump(2) + "\n";
}

LoopAlgebraElement element_from_json(const std::string& text) {
    json j = json::parse(text);
    LoopAlgebraElement e;
    e.N = j.at("N").get<int>();
    if (e.N < 1 || e.N > 255) throw std::invalid_argument("element N out of range");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "lower")
        e.kind = LoopAlgebraElement::Kind::lower;
    else if (kind == "upper")
        e.kind = LoopAlgebraElement::Kind::upper;
    else if (kind == "general")
        e.kind = LoopAlgebraElement::Kind::general;
    else
        throw std::invalid_argument("element kind must be 'lower', 'upper' or 'general'");
    for (const auto& entry : j.at("matrices")) {
        int l = entry.at("l").get<int>();
        if (e.kind != LoopAlgebraElement::Kind::general && l < 1)
            throw std::invalid_argument("matrix index l must be >= 1");
        int power = (e.kind == LoopAlgebraElement::Kind::lower) ? -l : l;
        RatMatrix M(e.N);
        const auto& rows = entry.at("m");
        if (static_cast<int>(rows.size()) != e.N) throw std::invalid_argument("matrix row count mismatch");
        for (int i = 0; i < e.N; ++i) {
            const auto& row = rows.at(static_cast<std::size_t>(i));
            if (static_cast<int>(row.size()) != e.N)
                throw std::invalid_argument("matrix column count mismatch");
            for (int k = 0; k < e.N; ++k)
                M.at(i, k) = rat_from_string(row.at(static_cast<std::size_t>(k)).get<std::string>());
        }
        if (!M.is_zero()) {
            auto [it, inserted] = e.by_power.emplace(power, std::move(M));
            if (!inserted) throw std::invalid_argument("duplicate matrix index " + std::to_string(l));
        }
    }
    return e;
}

std::string exact_region_to_json(const ExactRegion& r) {
    ordered j;
    j["history"] = ExactRegion::history_name(r.history);
    j["weight"] = r.weight_budget;
    j["build"] = window_json(r.build);
    return j.dump(2) + "\n";
}

ExactRegion exact_region_from_json(const std::string& text) {
    json j = json::parse(text);
    ExactRegion r;
    std::string h = j.at("history").get<std::string>();
    if (h == "pristine")
        r.history = ExactRegion::History::pristine;
    else if (h == "upper")
        r.history = ExactRegion::History::upper;
    else if (h == "lower")
        r.history = ExactRegion::History::lower;
    else if (h == "mixed")
        r.history = ExactRegion::History::mixed;
    else
        throw std::invalid_argument("unknown exactness history '" + h + "'");
    r.weight_budget = j.at("weight").get<long>();
    r.build = window_parse(j.at("build"));
    return r;
}

std::string invariance_report_to_json(const InvarianceReport& rep) {
    ordered j;
    j["pass"] = rep.pass;
    if (!rep.pipeline_note.empty()) j["pipeline"] = rep.pipeline_note;
    ordered rels = ordered::array();
    for (const auto& r : rep.relations) {
        ordered e;
        e["relation"] = r.relation;
        e["pass"] = r.pass;
        e["assignments"] = r.assignments;
        e["nonzero_uncertified"] = r.nonzero_uncertified;
        e["exact_region"] = r.exact_region_note;
        ordered fails = ordered::array();
        for (const auto& f : r.failures) {
            ordered fe;
            ordered asg = ordered::array();
            for (const auto& a : f.assignment) asg.push_back(ordered::array({a.mu, a.level}));
            fe["assignment"] = std::move(asg);
            fe["witness"] = f.witness.str();
            fe["residual"] = rat_to_string(f.value);
            fails.push_back(std::move(fe));
        }
        e["residual_terms"] = std::move(fails);
        rels.push_back(std::move(e));
    }
    j["relations"] = std::move(rels);
    return j.dump(2) + "\n";
}

}  // namespace loopfock
