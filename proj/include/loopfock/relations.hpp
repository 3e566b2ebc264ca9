#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopfock/loopgrp.hpp"
#include "loopfock/potential.hpp"

namespace loopfock {

// --- Relation AST ------------------------------------------------------
//
// A relation is a formal sum of terms; each term is a rational coefficient
// times a product of factors. Factors are correlator factors (a genus label
// and a list of insertion specs, an empty list meaning F_g itself) or
// explicit variable multiplications. Insertion directions refer to free
// slots, to contracted indices summed over the basis (the metric is the
// identity), or to the distinguished direction; levels are free-slot levels
// with offsets, summed level variables with offsets, or constants.

struct LevelExpr {
    enum class Base { constant, slot, sumlevel };
    Base base = Base::constant;
    int index = 0;   // slot index / sumlevel index within the term
    int offset = 0;  // additive constant (may be negative)
};

struct DirExpr {
    enum class Base { slot, contracted, unit };
    Base base = Base::slot;
    int index = 0;  // slot index / contracted index within the term
};

struct InsSpec {
    DirExpr dir;
    LevelExpr level;
};

struct Factor {
    enum class Kind { correlator, variable };
    Kind kind = Kind::correlator;
    int genus = 0;              // correlator only
    std::vector<InsSpec> ins;   // correlator: insertions; variable: exactly one
};

struct Term {
    Rational coeff;
    std::vector<std::string> contracted;  // direction names bound by `sum`
    std::vector<std::string> sumlevels;   // level names bound by `sumlevel`
    std::vector<Factor> factors;
};

struct FreeSlot {
    std::string name;        // direction part
    std::string level_name;  // level part
};

struct Relation {
    std::string name;
    int genus = 0;
    std::vector<FreeSlot> free_slots;
    std::vector<Term> terms;
};

// --- Parser -------------------------------------------------------------

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(int l, int c, const std::string& msg)
        : std::runtime_error("parse error at " + std::to_string(l) + ":" + std::to_string(c) + ": " + msg),
          line(l),
          column(c) {}
};

// Parses the line-oriented relation grammar (see docs/relations.md).
// Throws ParseError with line/column diagnostics.
Relation parse_relation(const std::string& text);

// Canonical text form; parse(serialize(r)) == r.
std::string serialize_relation(const Relation& r);

// Built-in relations: SE, DE, TRR, TRR1. Throws for unknown names.
const Relation& builtin_relation(const std::string& name);
const std::vector<std::string>& builtin_relation_names();
// Source text of a built-in (identical to the shipped data file).
const std::string& builtin_relation_text(const std::string& name);

// --- Evaluation ---------------------------------------------------------

struct SlotAssignment {
    int mu = 1;
    int level = 0;
};

// Residual series of one free-slot assignment: LHS - RHS as a t-series.
TruncatedSeries evaluate_relation_at(const Relation& rel, const Potential& p,
                                     const std::vector<SlotAssignment>& assignment);

struct ResidualFailure {
    std::vector<SlotAssignment> assignment;
    Monomial witness;
    Rational value;
    bool certified;  // inside the guaranteed-exact region
};

struct RelationReport {
    std::string relation;
    bool pass = true;                  // no certified nonzero residual coefficient
    long assignments = 0;
    long nonzero_uncertified = 0;      // residual coefficients outside the certified region
    std::vector<ResidualFailure> failures;  // certified nonzero coefficients (hard failures)
    std::string exact_region_note;
};

// Evaluates the relation for every admissible free-slot assignment with
// levels bounded so that all referenced levels stay <= level_cap (default:
// the window's K). Residual coefficients inside the guaranteed-exact region
// must vanish; nonzero coefficients outside it are reported but do not fail.
// Throws "insufficient window" when nothing at all is assertable.
RelationReport evaluate_relation(const Relation& rel, const Potential& p, int level_cap = -1);

// --- Invariance pipeline -------------------------------------------------

struct InvarianceOptions {
    int level_cap = -1;  // forwarded to evaluate_relation
};

struct InvarianceReport {
    std::vector<RelationReport> relations;
    bool pass = true;
    std::string pipeline_note;
};

// vertex(window) -> exp action of each element in order -> every relation.
InvarianceReport check_invariance(const std::vector<Relation>& rels,
                                  const std::vector<LoopAlgebraElement>& elements, const Window& w,
                                  const InvarianceOptions& opts = {});

// Same checks against an already-built potential.
InvarianceReport check_relations(const std::vector<Relation>& rels, const Potential& p,
                                 const InvarianceOptions& opts = {});

}  // namespace loopfock
