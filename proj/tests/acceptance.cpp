// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "bapal/bisim.hpp"
#include "bapal/check.hpp"
#include "bapal/decide.hpp"
#include "bapal/fmp.hpp"
#include "bapal/normalform.hpp"
#include "bapal/random.hpp"
#include "oracle.hpp"
#include "suites.hpp"

using namespace bapal;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* name, const std::function<Result()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
        r = fn();
    } catch (const std::exception& e) {
        r = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r.pass) ++failures;
    std::printf("%s %2d %-28s %7.1fs  %s\n", r.pass ? "PASS" : "FAIL", id, name, secs, r.detail.c_str());
    std::fflush(stdout);
}

double since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FormulaGenSpec gen(std::vector<std::string> atoms, int depth, bool box = true) {
    FormulaGenSpec s;
    s.atoms = std::move(atoms);
    s.depth = depth;
    s.allow_box = box;
    return s;
}

std::vector<std::string> atom_names(const Model& m) {
    std::vector<std::string> out;
    for (const auto& [a, d] : m.valuation) out.push_back(symbol_name(a));
    return out;
}

Result reduction_axioms() {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t checks = 0, bad = 0;
    std::string first;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        RandomModelSpec spec;
        spec.max_worlds = 6;
        spec.max_atoms = 4;
        Model m = random_model(seed, spec);
        Rng rng(seed ^ 0x5eedULL);
        auto atoms = atom_names(m);
        auto f = [&] { return random_formula(rng, gen(atoms, 2)); };
        Formula phi = f(), psi = f(), psi2 = f();
        Formula p = atom(atoms[static_cast<std::size_t>(rng.below(static_cast<int>(atoms.size())))]);
        std::string ag = rng.coin() ? "a" : "b";
        std::vector<std::pair<const char*, Formula>> inst{
            {"AP", iff(ann(phi, p), implies(phi, p))},
            {"AN", iff(ann(phi, neg(psi)), implies(phi, neg(ann(phi, psi))))},
            {"AC", iff(ann(phi, conj(psi, psi2)), conj(ann(phi, psi), ann(phi, psi2)))},
            {"AK", iff(ann(phi, know(ag, psi)), implies(phi, know(ag, ann(phi, psi))))},
            {"AA", iff(ann(phi, ann(psi, psi2)), ann(conj(phi, ann(phi, psi)), psi2))},
        };
        for (int i = 0; i < 20; ++i) inst.emplace_back("AB", implies(box(psi), ann(random_boolean(rng, atoms, 3), psi)));
        Checker chk(m);
        for (const auto& [name, g] : inst) {
            ++checks;
            if (chk.extension(g) != m.all()) {
                if (!bad++) first = std::string(name) + " on seed " + std::to_string(seed) + ": " + to_string(g);
            }
        }
    }
    double t = since(t0);
    std::ostringstream os;
    os << checks << " instances, " << bad << " violations";
    if (bad) os << "; first " << first;
    if (t > 60) os << "; over 60s";
    return {bad == 0 && t <= 60, os.str()};
}

Result box_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    std::vector<Formula> boxes;
    for (int i = 0; i < 40; ++i) {
        Formula f = random_formula(rng, gen({"p", "q"}, 3));
        std::vector<Formula> sf;
        oracle::all_subformulas(f, sf);
        for (const auto& g : sf)
            if (g->op == Op::Box) boxes.push_back(g);
    }
    std::size_t models = 0, checks = 0, bad = 0, unsaturated = 0;
    for (const auto& atoms : std::vector<std::vector<std::string>>{{"p"}, {"p", "q"}})
        oracle::each_model(3, {"a", "b"}, atoms, [&](const oracle::Plain& pm) {
            ++models;
            Model m = oracle::to_model(pm);
            Checker chk(m);
            for (const auto& b : boxes) {
                WorldSet e = chk.extension(b);
                for (int s = 0; s < static_cast<int>(m.size()); ++s) {
                    ++checks;
                    auto rep = bounded_boolean_box(m, s, b->l, 24);
                    if (!rep.saturated) ++unsaturated;
                    if (rep.value != e.test(static_cast<std::size_t>(s))) ++bad;
                }
            }
            return false;
        });
    double t = since(t0);
    std::ostringstream os;
    os << models << " models, " << boxes.size() << " box subformulas, " << checks << " checks, " << bad
       << " mismatches, " << unsaturated << " unsaturated enumerations";
    return {bad == 0 && unsaturated == 0 && t <= 120, os.str()};
}

Result bisim_invariance() {
    std::size_t full_pairs = 0, n_pairs = 0, x_pairs = 0, bad = 0, formulas = 0;
    std::string first;
    auto note = [&](const std::string& s) {
        if (!bad++) first = s;
    };
    // full bisimulation: blown-up copies
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Model m = random_model(seed, 4, 2, {"a", "b"});
        Rng rng(seed + 7);
        std::vector<int> origin;
        Model n = oracle::blow_up(m, rng, origin);
        int t = rng.below(static_cast<int>(n.size()));
        int s = origin[static_cast<std::size_t>(t)];
        auto w = bisimilar(m, s, n, t);
        if (!w || !verify_witness(*w, m, n)) {
            note("blow-up not recognised as bisimilar, seed " + std::to_string(seed));
            continue;
        }
        ++full_pairs;
        Checker cm(m), cn(n);
        auto atoms = atom_names(m);
        for (int i = 0; i < 200; ++i) {
            Formula f = random_formula(rng, gen(atoms, 4));
            ++formulas;
            if (cm.holds(s, f) != cn.holds(t, f)) note("full, seed " + std::to_string(seed) + ": " + to_string(f));
        }
    }
    // n-bisimulation: sampled pairs, confirmed by the definitional oracle
    for (std::uint64_t seed = 0; n_pairs < 200 && seed < 20000; ++seed) {
        Model m = random_model(seed, 3, 1, {"a", "b"});
        Model n = random_model(seed + 100000, 3, 1, {"a", "b"});
        Rng rng(seed * 31 + 1);
        int k = 1 + rng.below(2);
        int s = rng.below(static_cast<int>(m.size())), t = rng.below(static_cast<int>(n.size()));
        bool lib = n_bisimilar(k, m, s, n, t);
        bool ref = oracle::bisim_table(oracle::from_model(m), oracle::from_model(n), k)[static_cast<std::size_t>(s)][static_cast<std::size_t>(t)];
        if (lib != ref) {
            note("n-bisimilarity disagrees with the oracle, seed " + std::to_string(seed));
            continue;
        }
        if (!lib) continue;
        ++n_pairs;
        Checker cm(m), cn(n);
        for (int i = 0; i < 50;) {
            Formula f = random_formula(rng, gen({"p"}, 4));
            if (modal_depth(f) > k) continue;
            ++i, ++formulas;
            if (cm.holds(s, f) != cn.holds(t, f)) note(std::to_string(k) + "-bisimilar, seed " + std::to_string(seed) + ": " + to_string(f));
        }
    }
    // X!-bisimulation: copies with the atoms outside X permuted
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        RandomModelSpec spec;
        spec.max_worlds = 4;
        spec.max_atoms = 3;
        Model m = random_model(seed + 500, spec);
        Rng rng(seed + 11);
        std::vector<int> origin;
        Model n = oracle::blow_up(m, rng, origin, {{"q", "s"}, {"s", "q"}, {"r", "t"}, {"t", "r"}});
        int t = rng.below(static_cast<int>(n.size()));
        int s = origin[static_cast<std::size_t>(t)];
        std::set<AtomId> X{intern("p")};
        auto w = x_announcement_bisimilar(X, m, s, n, t);
        if (!w || !verify_witness(*w, m, n)) {
            note("permuted copy not X!-bisimilar, seed " + std::to_string(seed));
            continue;
        }
        ++x_pairs;
        Checker cm(m), cn(n);
        for (int i = 0; i < 200; ++i) {
            Formula f = random_formula(rng, gen({"p"}, 4));
            ++formulas;
            if (cm.holds(s, f) != cn.holds(t, f)) note("X!, seed " + std::to_string(seed) + ": " + to_string(f));
        }
    }
    std::ostringstream os;
    os << full_pairs << " bisimilar, " << n_pairs << " n-bisimilar, " << x_pairs << " X!-bisimilar pairs; " << formulas
       << " formulas; " << bad << " violations";
    if (bad) os << "; first " << first;
    return {bad == 0 && full_pairs == 200 && n_pairs == 200 && x_pairs == 200, os.str()};
}

Result aanf_translation() {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t bad = 0;
    std::string first;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Rng rng(seed * 977 + 3);
        Model m = random_model(seed + 9000, 5, 3, {"a", "b"});
        Formula f = random_formula(rng, gen({"p", "q", "r"}, 4));
        auto [g, trace] = to_aanf(f);
        int w = rng.below(static_cast<int>(m.size()));
        bool ok = is_aanf(g) && equal(replay(f, trace), g) && check(m, w, f) == check(m, w, g);
        if (!ok && !bad++) first = to_string(f) + "  ->  " + to_string(g);
    }
    double t = since(t0);
    std::ostringstream os;
    os << "1000 triples, " << bad << " violations";
    if (bad) os << "; first " << first;
    return {bad == 0 && t <= 60, os.str()};
}

Result fmp_reproduction() {
    std::ostringstream os;
    bool ok = true;
    Model f1 = fig1_model();
    auto cs = fmp_conjuncts();
    int A = f1.world_index("A");
    bool whole = check(f1, A, fmp_formula());
    os << "fig1 A: fmp " << (whole ? "true" : "false") << ", conjuncts ";
    for (std::size_t i = 0; i < cs.size(); ++i) {
        bool v = check(f1, A, cs[i]);
        os << (v ? 'T' : 'F');
        ok &= (v == (i < 4));
    }
    ok &= !whole;
    Model f2 = fig2_truncation(3);
    os << "; truncation A0 conjuncts ";
    for (std::size_t i = 0; i < 4; ++i) {
        bool v = check(f2, f2.world_index("A0"), cs[i]);
        os << (v ? 'T' : 'F');
        ok &= v;
    }
    Deadline dl(600);
    auto t0 = std::chrono::steady_clock::now();
    FmpReport r = finite_search(4, &dl);
    os << "; search(4) " << (r.counterexample ? "counterexample" : "none_found") << " over " << r.examined << " models in "
       << static_cast<int>(since(t0)) << "s";
    ok &= !r.counterexample;
    return {ok, os.str()};
}

Result image_consistency() {
    std::size_t trials = 0, fails = 0;
    std::string first;
    for (const auto& text : image_suite()) {
        Formula f = parse(text);
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            Model m = random_model(seed + 300, 4, 2, {"a", "b"});
            PseudoModel p = phi_image(m, f);
            ++trials;
            Tri t = consistent(p, quantifier_depth(f));
            if (t != Tri::True && !fails++) first = text + " on seed " + std::to_string(seed) + ": " + to_string(t);
        }
    }
    std::ostringstream os;
    os << trials << " images, " << fails << " not consistent";
    if (fails) os << "; first " << first;
    return {fails == 0, os.str()};
}

Result decision_d0() {
    auto t0 = std::chrono::steady_clock::now();
    std::size_t agree = 0, total = 0;
    std::string first;
    for (const auto& c : d0_suite()) {
        Formula f = parse(c.text);
        ++total;
        bool ref = oracle::satisfiable_upto(f, search_bound(f));
        SatVerdict v = satisfiable(f, Engine::Pruned);
        bool ok = v.outcome == (ref ? Outcome::Sat : Outcome::Unsat) && ref == c.sat;
        if (ok) ++agree;
        else if (first.empty()) first = std::string(c.text) + ": engine " + to_string(v.outcome) + ", search " + (ref ? "sat" : "unsat");
    }
    double t = since(t0);
    std::ostringstream os;
    os << agree << "/" << total << " agree with exhaustive search";
    if (!first.empty()) os << "; first disagreement " << first;
    return {agree == total && total == 40 && t <= 300, os.str()};
}

Result engine_agreement() {
    auto t0 = std::chrono::steady_clock::now();
    const double total_budget = 600;
    std::size_t terminated = 0, disagree = 0, exhausted = 0;
    std::string first;
    for (const auto& c : d0_suite()) {
        double left = total_budget - since(t0);
        if (left <= 1) break;
        Formula f = parse(c.text);
        Budget b;
        b.seconds = std::min(left, 60.0);
        SatVerdict slow = satisfiable(f, Engine::Faithful, b);
        if (slow.outcome == Outcome::ResourceExhausted) {
            ++exhausted;
            continue;
        }
        ++terminated;
        SatVerdict fast = satisfiable(f, Engine::Pruned);
        if (fast.outcome != slow.outcome && !disagree++) first = std::string(c.text);
    }
    std::ostringstream os;
    os << terminated << " terminated, " << exhausted << " exhausted, " << disagree << " disagreements";
    if (disagree) os << "; first " << first;
    return {disagree == 0 && terminated >= 10, os.str()};
}

Result d1_stretch() {
    Formula f = conj(ann(top(), box(atom("p"))), atom("p"));
    Budget b;
    b.seconds = 120;
    SatVerdict v = satisfiable(f, Engine::Pruned, b);
    std::ostringstream os;
    os << to_string(f) << ": " << to_string(v.outcome);
    if (v.outcome != Outcome::Sat || !v.witness) {
        if (!v.exhausted.empty()) os << " (" << v.exhausted << ")";
        return {false, os.str()};
    }
    auto reps = validate(*v.witness);
    std::size_t ok = 0;
    for (const auto& r : reps) ok += r.ok;
    Tri c = consistent(*v.witness, 1);
    bool holds_root = v.witness->has(v.state, v.witness->ct->root);
    os << "; witness " << v.witness->size() << " states, clauses " << ok << "/" << reps.size() << ", consistent(1) " << to_string(c);
    return {ok == 6 && reps.size() == 6 && c == Tri::True && holds_root, os.str()};
}

int degree(int prime, int n) {
    int d = 0;
    while (n % prime == 0) n /= prime, ++d;
    return d;
}

Result actualisation() {
    PseudoModel p = five_state_example();
    ActualiseOptions opt;
    opt.copies = 3;
    opt.act_limit = 12;
    Model m = actualise(p, opt);
    const int primes[] = {2, 3};
    std::size_t cells = 0, bad = 0;
    std::string first;
    for (std::size_t s = 0; s < p.size(); ++s)
        for (int n = 1; n <= 3; ++n) {
            int w = m.world_index("(" + p.names[s] + "," + std::to_string(n) + ")");
            for (std::size_t j = 0; j < p.atlas.names.size(); ++j)
                for (int i = 1; i <= 12; ++i) {
                    bool want = p.atlas.denot[j].test(s) && degree(primes[j], i) == degree(primes[j], n);
                    bool got = m.truth(intern("q" + std::to_string(j) + "_" + std::to_string(i)), w);
                    ++cells;
                    if (want != got && !bad++) first = m.worlds[static_cast<std::size_t>(w)] + " q" + std::to_string(j) + "_" + std::to_string(i);
                }
            for (const auto& h : p.atlas.names)
                if (m.truth(intern(h), w) && !bad++) first = "hue atom " + h + " true";
        }
    // the figure's row for (x,1): indices up to 6
    int x1 = m.world_index("(x,1)");
    std::vector<std::string> row;
    for (int j = 0; j < 2; ++j)
        for (int i = 1; i <= 6; ++i)
            if (m.truth(intern("q" + std::to_string(j) + "_" + std::to_string(i)), x1)) row.push_back("q" + std::to_string(j) + "_" + std::to_string(i));
    bool fig = row == std::vector<std::string>{"q0_1", "q0_3", "q0_5"};
    std::ostringstream os;
    os << cells << " act cells, " << bad << " mismatches; (x,1) carries";
    for (const auto& r : row) os << " " << r;
    if (bad) os << "; first " << first;
    return {bad == 0 && fig, os.str()};
}

}  // namespace

int main() {
    run(1, "reduction axioms", reduction_axioms);
    run(2, "box oracle equivalence", box_oracle);
    run(3, "bisimulation invariance", bisim_invariance);
    run(4, "AANF translation", aanf_translation);
    run(5, "fmp reproduction", fmp_reproduction);
    run(6, "image consistency", image_consistency);
    run(7, "D=0 decision soundness", decision_d0);
    run(8, "engine agreement", engine_agreement);
    run(9, "D=1 stretch case", d1_stretch);
    run(10, "actualisation fidelity", actualisation);
    return failures ? 1 : 0;
}
