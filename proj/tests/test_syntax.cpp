#include <doctest.h>

#include "bapal/closure.hpp"
#include "bapal/decide.hpp"
#include "bapal/fmp.hpp"
#include "bapal/formula.hpp"
#include "bapal/random.hpp"
#include "oracle.hpp"

using namespace bapal;

namespace {

// metrics by the textbook clauses, kept apart from the library's walker
int ref_d(const Formula& f) {
    switch (f->op) {
        case Op::Atom: return 0;
        case Op::Not:
        case Op::Box: return ref_d(f->l);
        case Op::And: return std::max(ref_d(f->l), ref_d(f->r));
        case Op::Ann: return ref_d(f->l) + ref_d(f->r);
        case Op::Know: return ref_d(f->l) + 1;
    }
    return 0;
}
int ref_D(const Formula& f) {
    switch (f->op) {
        case Op::Atom: return 0;
        case Op::Not:
        case Op::Know: return ref_D(f->l);
        case Op::And:
        case Op::Ann: return std::max(ref_D(f->l), ref_D(f->r));
        case Op::Box: return ref_D(f->l) + 1;
    }
    return 0;
}

std::set<std::string> strings(const std::vector<Formula>& fs) {
    std::set<std::string> out;
    for (const auto& f : fs) out.insert(to_string(f));
    return out;
}

}  // namespace

TEST_CASE("parser builds the expected trees") {
    Formula f = parse("K a x");
    CHECK(f->op == Op::Know);
    CHECK(symbol_name(f->sym) == "a");
    CHECK(equal(f->l, atom("x")));

    CHECK(equal(parse("[x] box K b y"), ann(atom("x"), box(know("b", atom("y"))))));
    // the diamond is spelled out, double negation kept
    CHECK(equal(parse("<x> ~K a y"), neg(ann(atom("x"), neg(neg(know("a", atom("y"))))))));
    CHECK(equal(parse("p -> q"), neg(conj(atom("p"), neg(atom("q"))))));
    CHECK(equal(parse("Khat a p"), neg(know("a", neg(atom("p"))))));
    CHECK(equal(parse("dia p"), neg(box(neg(atom("p"))))));
}

TEST_CASE("precedence and grouping") {
    CHECK(equal(parse("~p & q"), conj(neg(atom("p")), atom("q"))));
    CHECK(equal(parse("p & q | r"), disj(conj(atom("p"), atom("q")), atom("r"))));
    CHECK(equal(parse("[p] q & r"), conj(ann(atom("p"), atom("q")), atom("r"))));
    CHECK(equal(parse("K a p & q"), conj(know("a", atom("p")), atom("q"))));
    CHECK(equal(parse("p -> q -> r"), implies(atom("p"), implies(atom("q"), atom("r")))));
}

TEST_CASE("malformed input is rejected with a position") {
    for (const char* bad : {"p &", "(p", "[p q", "K", "K a", "p q", "&", "p )", ""}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse(bad), ParseError);
    }
    try {
        parse("p & & q");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

TEST_CASE("printing round-trips on random formulas") {
    Rng rng(17);
    FormulaGenSpec spec;
    spec.atoms = {"p", "q", "x1"};
    spec.depth = 5;
    for (int i = 0; i < 2000; ++i) {
        Formula f = random_formula(rng, spec);
        CAPTURE(to_string(f));
        CHECK(equal(parse(to_string(f)), f));
    }
}

TEST_CASE("metrics") {
    Metrics m = metrics(parse("K a p"));
    CHECK(m.vars == std::set<std::string>{"p"});
    CHECK(m.d == 1);
    CHECK(m.D == 0);
    CHECK(modal_depth(parse("[K a p] K b q")) == 2);
    CHECK(modal_depth(parse("[p] box K a q")) == 1);
    CHECK(quantifier_depth(parse("[p] box K a q")) == 1);
    CHECK(quantifier_depth(parse("box (p & box q)")) == 2);

    Rng rng(5);
    FormulaGenSpec spec;
    spec.depth = 6;
    for (int i = 0; i < 2000; ++i) {
        Formula f = random_formula(rng, spec);
        CAPTURE(to_string(f));
        CHECK(modal_depth(f) == ref_d(f));
        CHECK(quantifier_depth(f) == ref_D(f));
    }
}

TEST_CASE("AANF recognition") {
    CHECK(is_aanf(parse("[p] box q")));
    CHECK_FALSE(is_aanf(parse("box q")));
    CHECK_FALSE(is_aanf(parse("[p] q")));
    CHECK(is_aanf(parse("[p] box [q] box r")));
    CHECK(is_aanf(parse("K a [p & K b q] box ~q")));
    CHECK_FALSE(is_aanf(parse("[[p] box q] box r & [p] K a q")));
    CHECK(is_aanf(parse("K a p & ~q")));
}

TEST_CASE("subformulas leave out the box under an announcement") {
    CHECK(strings(subformulas(parse("p"))) == std::set<std::string>{"p"});
    CHECK(strings(subformulas(parse("[p] box q"))) == std::set<std::string>{"p", "q", "[p] box q"});
    CHECK(strings(subformulas(parse("K a (p & q)"))) == std::set<std::string>{"K a (p & q)", "p & q", "p", "q"});
}

TEST_CASE("closure agrees with the brute-force enumerator") {
    CHECK(closure_formulas(parse("p")).cl_size() == 2);
    ClosureTable k = closure_formulas(parse("K a p"));
    CHECK(k.cl_size() == 6);
    CHECK(strings(k.cl()) == std::set<std::string>{"p", "~p", "K a p", "~K a p", "K a ~p", "~K a ~p"});

    std::vector<std::string> suite{"p", "K a p", "K a (p & q)", "K a K b p", "[p] box K a q", "K a [p] box ~K b q",
                                   "~K a ~p & [K b p] box q", "[p & K a q] box [q] box K b r"};
    Rng rng(41);
    FormulaGenSpec spec;
    spec.depth = 4;
    spec.allow_box = false;
    spec.allow_ann = false;
    for (int i = 0; i < 60; ++i) suite.push_back(to_string(random_formula(rng, spec)));
    for (const auto& s : suite) {
        Formula f = parse(s);
        CAPTURE(s);
        ClosureTable ct = closure_formulas(f);
        std::set<std::string> lib;
        for (const auto& b : ct.bases) lib.insert(to_string(b));
        CHECK(lib == oracle::closure_cores(f));
    }
}

TEST_CASE("maximal sets of K a p") {
    // sign patterns over (p, K a p, K a ~p) surviving the three clauses
    CHECK(oracle::count_maximal_sets(parse("K a p")) == 4);
    ClosureTable ct = closure_formulas(parse("K a p"));
    CHECK(maximal_colours(ct).size() == 4);
    for (const auto& s : {"p", "K a (p & q)", "K a p & ~K b p", "K a ~K a p", "[p] box K a q"}) {
        CAPTURE(s);
        CHECK(maximal_colours(closure_formulas(parse(s))).size() == oracle::count_maximal_sets(parse(s)));
    }
}

TEST_CASE("fresh atom counts") {
    CHECK(fresh_count_exact(6, 0) == std::optional<std::uint64_t>(6));
    CHECK(fresh_count_exact(2, 1) == std::optional<std::uint64_t>(16));
    CHECK_FALSE(fresh_count_exact(6, 1).has_value());
    CHECK(fresh_count_expr(6, 1) == "2^2^6");
    CHECK_THROWS_AS(closure(parse("[p] box q")), BudgetOverflow);
    ClosureOptions o;
    o.hue_budget = 3;
    ClosureTable ct = closure(parse("[p] box q"), o);
    CHECK(ct.fresh_count == 3);
    CHECK_FALSE(ct.fresh_faithful);
    CHECK_THROWS_AS(closure(parse("box q")), NotAanf);
}

TEST_CASE("fmp metrics") {
    Formula f = fmp_formula();
    CHECK(fmp_conjuncts().size() == 5);
    CHECK(metrics(f).vars == std::set<std::string>{"x", "y"});
    CHECK(quantifier_depth(f) == ref_D(f));
    CHECK(quantifier_depth(f) == 1);
    CHECK(modal_depth(f) == 3);
}
