#include "bapal/normalform.hpp"

#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace bapal {

namespace {

// a -> b, without stacking a double negation when b is already negated
Formula imp(const Formula& a, const Formula& b) {
    if (b->op == Op::Not) return neg(conj(a, b->l));
    return implies(a, b);
}

const char* rule_for(const Formula& f, bool under_ann_body) {
    if (f->op == Op::Box) return under_ann_body ? nullptr : "BX";
    if (f->op != Op::Ann) return nullptr;
    switch (f->r->op) {
        case Op::Atom: return "AP";
        case Op::Not: return "AN";
        case Op::And: return "AC";
        case Op::Know: return "AK";
        case Op::Ann: return "AA";
        case Op::Box: return nullptr;
    }
    return nullptr;
}

struct Found {
    std::vector<int> path;
    const char* rule;
};

// Post-order search: the first redex with no redex below it.
std::optional<Found> innermost(const Formula& f, bool under_ann_body, std::vector<int>& path) {
    if (f->l) {
        path.push_back(0);
        auto r = innermost(f->l, false, path);
        path.pop_back();
        if (r) return r;
    }
    if (f->r) {
        path.push_back(1);
        auto r = innermost(f->r, f->op == Op::Ann, path);
        path.pop_back();
        if (r) return r;
    }
    if (const char* rule = rule_for(f, under_ann_body)) return Found{path, rule};
    return std::nullopt;
}

const Formula& at(const Formula& f, const std::vector<int>& path, std::size_t i = 0) {
    if (i == path.size()) return f;
    const Formula& c = path[i] == 0 ? f->l : f->r;
    if (!c) throw std::logic_error("rewrite position leaves the formula");
    return at(c, path, i + 1);
}

Formula rebuild(const Formula& f, const Formula& l, const Formula& r) {
    switch (f->op) {
        case Op::Atom: return f;
        case Op::Not: return neg(l);
        case Op::And: return conj(l, r);
        case Op::Know: return know(f->sym, l);
        case Op::Ann: return ann(l, r);
        case Op::Box: return box(l);
    }
    return f;
}

Formula replace(const Formula& f, const std::vector<int>& path, const Formula& with, std::size_t i = 0) {
    if (i == path.size()) return with;
    if (path[i] == 0) return rebuild(f, replace(f->l, path, with, i + 1), f->r);
    return rebuild(f, f->l, replace(f->r, path, with, i + 1));
}

using u128 = unsigned __int128;
constexpr u128 kMax = ~u128{0};

u128 sat_add(u128 a, u128 b, bool& s) {
    if (a > kMax - b) {
        s = true;
        return kMax;
    }
    return a + b;
}
u128 sat_mul(u128 a, u128 b, bool& s) {
    if (a != 0 && b > kMax / a) {
        s = true;
        return kMax;
    }
    return a * b;
}

u128 weight(const Formula& f, bool& s) {
    switch (f->op) {
        case Op::Atom: return 1;
        case Op::Not:
        case Op::Know:
        case Op::Box: return sat_add(1, weight(f->l, s), s);
        case Op::And: return sat_add(1, sat_add(weight(f->l, s), weight(f->r, s), s), s);
        case Op::Ann: return sat_mul(sat_add(5, weight(f->l, s), s), weight(f->r, s), s);
    }
    return 1;
}

std::size_t bare_boxes(const Formula& f, bool under_ann_body) {
    std::size_t n = (f->op == Op::Box && !under_ann_body) ? 1 : 0;
    if (f->l) n += bare_boxes(f->l, false);
    if (f->r) n += bare_boxes(f->r, f->op == Op::Ann);
    return n;
}

std::string path_text(const std::vector<int>& p) {
    if (p.empty()) return "root";
    std::string s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(p[i]);
    }
    return s;
}

}  // namespace

NfMeasure nf_measure(const Formula& f) {
    NfMeasure m;
    m.bare_boxes = bare_boxes(f, false);
    m.weight = weight(f, m.saturated);
    return m;
}

Formula apply_rule(const std::string& axiom, const Formula& g) {
    auto bad = [&] { return std::invalid_argument("rule " + axiom + " does not match " + to_string(g)); };
    if (axiom == "BX") {
        if (g->op != Op::Box) throw bad();
        return ann(top(), g);
    }
    if (g->op != Op::Ann) throw bad();
    const Formula& a = g->l;
    const Formula& b = g->r;
    if (axiom == "AP" && b->op == Op::Atom) return imp(a, b);
    if (axiom == "AN" && b->op == Op::Not) return imp(a, neg(ann(a, b->l)));
    if (axiom == "AC" && b->op == Op::And) return conj(ann(a, b->l), ann(a, b->r));
    if (axiom == "AK" && b->op == Op::Know) return imp(a, know(b->sym, ann(a, b->l)));
    if (axiom == "AA" && b->op == Op::Ann) return ann(conj(a, ann(a, b->l)), b->r);
    throw bad();
}

std::pair<Formula, RewriteTrace> to_aanf(const Formula& f) {
    RewriteTrace t;
    Formula cur = f;
    NfMeasure m = nf_measure(cur);
    for (;;) {
        std::vector<int> path;
        auto hit = innermost(cur, false, path);
        if (!hit) break;
        const Formula& redex = at(cur, hit->path);
        Formula out = apply_rule(hit->rule, redex);
        Formula next = replace(cur, hit->path, out);
        NfMeasure nm = nf_measure(next);
        if (!m.saturated && !nm.saturated && !(nm < m))
            throw std::logic_error("normal form measure did not decrease at rule " + std::string(hit->rule));
        t.steps.push_back({hit->rule, hit->path, redex, out});
        cur = std::move(next);
        m = nm;
    }
    return {cur, std::move(t)};
}

Formula replay(const Formula& input, const RewriteTrace& trace) {
    Formula cur = input;
    for (const auto& s : trace.steps) {
        const Formula& redex = at(cur, s.position);
        if (!equal(redex, s.before)) throw std::logic_error("trace step " + s.axiom + " at " + path_text(s.position) + " does not match");
        Formula out = apply_rule(s.axiom, redex);
        if (!equal(out, s.after)) throw std::logic_error("trace step " + s.axiom + " produced a different result");
        cur = replace(cur, s.position, out);
    }
    return cur;
}

std::string to_text(const RewriteTrace& t) {
    std::ostringstream os;
    for (const auto& s : t.steps) os << s.axiom << " @" << path_text(s.position) << ": " << to_string(s.before) << "  =>  " << to_string(s.after) << "\n";
    return os.str();
}

nlohmann::json to_json(const RewriteTrace& t) {
    auto arr = nlohmann::json::array();
    for (const auto& s : t.steps)
        arr.push_back({{"axiom", s.axiom}, {"position", s.position}, {"before", to_string(s.before)}, {"after", to_string(s.after)}});
    return arr;
}

}  // namespace bapal
