#include "bapal/formula.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace bapal {

// ── interning ───────────────────────────────────────────────────────────

namespace {

struct Interner {
    std::mutex mu;
    std::deque<std::string> names;
    std::unordered_map<std::string, Symbol> ids;
};

Interner& interner() {
    static Interner in;
    return in;
}

std::size_t mix(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

Formula make(Op op, Symbol sym, Formula l, Formula r) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->sym = sym;
    std::size_t h = static_cast<std::size_t>(op) + 1;
    std::size_t sz = 1;
    if (op == Op::Atom || op == Op::Know) h = mix(h, std::hash<std::string>{}(symbol_name(sym)));
    if (l) {
        h = mix(h, l->hash);
        sz += l->size;
    }
    if (r) {
        h = mix(h, r->hash);
        sz += r->size;
    }
    n->l = std::move(l);
    n->r = std::move(r);
    n->hash = h;
    n->size = sz;
    return n;
}

}  // namespace

Symbol intern(std::string_view name) {
    auto& in = interner();
    std::lock_guard lk(in.mu);
    std::string key(name);
    auto it = in.ids.find(key);
    if (it != in.ids.end()) return it->second;
    Symbol id = static_cast<Symbol>(in.names.size());
    in.names.push_back(key);
    in.ids.emplace(std::move(key), id);
    return id;
}

const std::string& symbol_name(Symbol s) {
    auto& in = interner();
    std::lock_guard lk(in.mu);
    return in.names.at(s);
}

// ── constructors ────────────────────────────────────────────────────────

Formula atom(std::string_view name) { return make(Op::Atom, intern(name), nullptr, nullptr); }
Formula atom(AtomId a) { return make(Op::Atom, a, nullptr, nullptr); }
Formula neg(Formula f) { return make(Op::Not, 0, std::move(f), nullptr); }
Formula conj(Formula a, Formula b) { return make(Op::And, 0, std::move(a), std::move(b)); }
Formula know(std::string_view agent, Formula f) { return make(Op::Know, intern(agent), std::move(f), nullptr); }
Formula know(AgentId a, Formula f) { return make(Op::Know, a, std::move(f), nullptr); }
Formula ann(Formula announced, Formula body) { return make(Op::Ann, 0, std::move(announced), std::move(body)); }
Formula box(Formula f) { return make(Op::Box, 0, std::move(f), nullptr); }

Formula disj(Formula a, Formula b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }
Formula implies(Formula a, Formula b) { return neg(conj(std::move(a), neg(std::move(b)))); }
Formula iff(Formula a, Formula b) { return conj(implies(a, b), implies(b, a)); }
Formula khat(std::string_view agent, Formula f) { return neg(know(agent, neg(std::move(f)))); }
Formula khat(AgentId a, Formula f) { return neg(know(a, neg(std::move(f)))); }
Formula dia_ann(Formula announced, Formula body) { return neg(ann(std::move(announced), neg(std::move(body)))); }
Formula dia(Formula f) { return neg(box(neg(std::move(f)))); }
Formula top() {
    auto p = atom(kTopAtom);
    return disj(p, neg(p));
}
Formula bottom() { return neg(top()); }

Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return top();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
}

Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return bottom();
    Formula acc = fs.front();
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
}

bool equal(const Formula& a, const Formula& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->hash != b->hash || a->op != b->op || a->size != b->size || a->sym != b->sym) return false;
    if (a->l && !equal(a->l, b->l)) return false;
    if (a->r && !equal(a->r, b->r)) return false;
    return true;
}

namespace {
int compare(const Formula& a, const Formula& b) {
    if (a.get() == b.get()) return 0;
    if (a->size != b->size) return a->size < b->size ? -1 : 1;
    if (a->op != b->op) return a->op < b->op ? -1 : 1;
    if (a->op == Op::Atom || a->op == Op::Know) {
        if (a->sym != b->sym) {
            int c = symbol_name(a->sym).compare(symbol_name(b->sym));
            if (c != 0) return c < 0 ? -1 : 1;
        }
    }
    if (a->l) {
        int c = compare(a->l, b->l);
        if (c) return c;
    }
    if (a->r) {
        int c = compare(a->r, b->r);
        if (c) return c;
    }
    return 0;
}
}  // namespace

bool FormulaLess::operator()(const Formula& a, const Formula& b) const { return compare(a, b) < 0; }

std::pair<Formula, bool> strip_negations(const Formula& f) {
    Formula g = f;
    bool odd = false;
    while (g->op == Op::Not) {
        g = g->l;
        odd = !odd;
    }
    return {g, odd};
}

Formula canonical(const Formula& f) {
    switch (f->op) {
        case Op::Atom:
            return f;
        case Op::Not: {
            if (f->l->op == Op::Not) return canonical(f->l->l);
            Formula c = canonical(f->l);
            return c.get() == f->l.get() ? f : neg(c);
        }
        case Op::Know: {
            Formula c = canonical(f->l);
            return c.get() == f->l.get() ? f : know(f->sym, c);
        }
        case Op::Box: {
            Formula c = canonical(f->l);
            return c.get() == f->l.get() ? f : box(c);
        }
        case Op::And:
        case Op::Ann: {
            Formula a = canonical(f->l), b = canonical(f->r);
            if (a.get() == f->l.get() && b.get() == f->r.get()) return f;
            return f->op == Op::And ? conj(a, b) : ann(a, b);
        }
    }
    return f;
}

// ── parser ──────────────────────────────────────────────────────────────

ParseError::ParseError(std::size_t pos, const std::string& msg)
    : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + msg), pos_(pos) {}

namespace {

enum class Tok { End, Ident, Not, And, Or, Imp, Iff, LParen, RParen, LBrack, RBrack, LAngle, RAngle };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start});
            continue;
        }
        auto starts = [&](std::string_view p) { return s.substr(i, p.size()) == p; };
        if (starts("<->")) {
            out.push_back({Tok::Iff, "<->", start});
            i += 3;
        } else if (starts("->")) {
            out.push_back({Tok::Imp, "->", start});
            i += 2;
        } else if (c == '~') {
            out.push_back({Tok::Not, "~", start});
            ++i;
        } else if (c == '&') {
            out.push_back({Tok::And, "&", start});
            ++i;
        } else if (c == '|') {
            out.push_back({Tok::Or, "|", start});
            ++i;
        } else if (c == '(') {
            out.push_back({Tok::LParen, "(", start});
            ++i;
        } else if (c == ')') {
            out.push_back({Tok::RParen, ")", start});
            ++i;
        } else if (c == '[') {
            out.push_back({Tok::LBrack, "[", start});
            ++i;
        } else if (c == ']') {
            out.push_back({Tok::RBrack, "]", start});
            ++i;
        } else if (c == '<') {
            out.push_back({Tok::LAngle, "<", start});
            ++i;
        } else if (c == '>') {
            out.push_back({Tok::RAngle, ">", start});
            ++i;
        } else {
            std::size_t j = i + 1;
            while (j < s.size() && std::ispunct(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')' &&
                   s[j] != '[' && s[j] != ']' && s[j] != '~')
                ++j;
            throw ParseError(start, "unknown operator '" + std::string(s.substr(start, j - start)) + "'");
        }
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

bool valid_atom(const std::string& t) {
    if (t.empty() || !(t[0] >= 'a' && t[0] <= 'z')) return false;
    for (char c : t)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
    return true;
}

bool valid_agent(const std::string& t) {
    if (t.empty()) return false;
    for (char c : t)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
    return true;
}

class Parser {
public:
    explicit Parser(std::string_view s) : toks_(lex(s)) {}

    Formula run() {
        Formula f = parse_iff();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return f;
    }

private:
    std::vector<Token> toks_;
    std::size_t k_ = 0;

    const Token& peek() const { return toks_[k_]; }
    Token take() { return toks_[k_++]; }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().pos, msg); }
    void expect(Tok t, const char* what) {
        if (peek().kind != t) fail(std::string("expected ") + what);
        ++k_;
    }

    Formula parse_iff() {
        Formula f = parse_imp();
        while (peek().kind == Tok::Iff) {
            take();
            f = iff(f, parse_imp());
        }
        return f;
    }

    Formula parse_imp() {
        Formula f = parse_or();
        if (peek().kind == Tok::Imp) {
            take();
            return implies(f, parse_imp());
        }
        return f;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (peek().kind == Tok::Or) {
            take();
            f = disj(f, parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (peek().kind == Tok::And) {
            take();
            f = conj(f, parse_unary());
        }
        return f;
    }

    std::string agent() {
        if (peek().kind != Tok::Ident || !valid_agent(peek().text)) fail("expected agent name");
        return take().text;
    }

    Formula parse_unary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Not:
                take();
                return neg(parse_unary());
            case Tok::LParen: {
                take();
                Formula f = parse_iff();
                expect(Tok::RParen, "')'");
                return f;
            }
            case Tok::LBrack: {
                take();
                Formula a = parse_iff();
                expect(Tok::RBrack, "']'");
                return ann(a, parse_unary());
            }
            case Tok::LAngle: {
                take();
                Formula a = parse_iff();
                expect(Tok::RAngle, "'>'");
                return dia_ann(a, parse_unary());
            }
            case Tok::Ident: {
                std::string w = t.text;
                if (w == "K") {
                    take();
                    std::string a = agent();
                    return know(a, parse_unary());
                }
                if (w == "Khat") {
                    take();
                    std::string a = agent();
                    return khat(a, parse_unary());
                }
                if (w == "box") {
                    take();
                    return box(parse_unary());
                }
                if (w == "dia") {
                    take();
                    return dia(parse_unary());
                }
                if (w == "true") {
                    take();
                    return top();
                }
                if (w == "false") {
                    take();
                    return bottom();
                }
                if (!valid_atom(w)) fail("invalid atom '" + w + "'");
                take();
                return atom(w);
            }
            case Tok::End:
                fail("unexpected end of input");
            default:
                fail("unexpected '" + t.text + "'");
        }
    }
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).run(); }

// ── printing ────────────────────────────────────────────────────────────

namespace {

struct Style {
    const char* neg;
    const char* conj;
    const char* box;
    bool unicode;
};

void print(const Formula& f, bool tight, const Style& st, std::string& out) {
    switch (f->op) {
        case Op::Atom:
            out += symbol_name(f->sym);
            return;
        case Op::Not:
            out += st.neg;
            print(f->l, true, st, out);
            return;
        case Op::Know:
            if (st.unicode) {
                out += "K_" + symbol_name(f->sym);
            } else {
                out += "K " + symbol_name(f->sym);
            }
            out += " ";
            print(f->l, true, st, out);
            return;
        case Op::Box:
            out += st.box;
            print(f->l, true, st, out);
            return;
        case Op::Ann:
            out += "[";
            print(f->l, false, st, out);
            out += "] ";
            print(f->r, true, st, out);
            return;
        case Op::And:
            if (tight) out += "(";
            print(f->l, false, st, out);
            out += st.conj;
            print(f->r, true, st, out);
            if (tight) out += ")";
            return;
    }
}

}  // namespace

std::string to_string(const Formula& f) {
    static const Style st{"~", " & ", "box ", false};
    std::string out;
    print(f, false, st, out);
    return out;
}

std::string to_pretty(const Formula& f) {
    static const Style st{"¬", " ∧ ", "□", true};
    std::string out;
    print(f, false, st, out);
    return out;
}

// ── metrics ─────────────────────────────────────────────────────────────

namespace {
void collect_vars(const Formula& f, std::set<AtomId>& out) {
    if (f->op == Op::Atom) {
        out.insert(f->sym);
        return;
    }
    if (f->l) collect_vars(f->l, out);
    if (f->r) collect_vars(f->r, out);
}
}  // namespace

std::set<AtomId> var(const Formula& f) {
    std::set<AtomId> out;
    collect_vars(f, out);
    return out;
}

int modal_depth(const Formula& f) {
    switch (f->op) {
        case Op::Atom:
            return 0;
        case Op::Not:
        case Op::Box:
            return modal_depth(f->l);
        case Op::And:
            return std::max(modal_depth(f->l), modal_depth(f->r));
        case Op::Ann:
            return modal_depth(f->l) + modal_depth(f->r);
        case Op::Know:
            return modal_depth(f->l) + 1;
    }
    return 0;
}

int quantifier_depth(const Formula& f) {
    switch (f->op) {
        case Op::Atom:
            return 0;
        case Op::Not:
        case Op::Know:
            return quantifier_depth(f->l);
        case Op::And:
        case Op::Ann:
            return std::max(quantifier_depth(f->l), quantifier_depth(f->r));
        case Op::Box:
            return quantifier_depth(f->l) + 1;
    }
    return 0;
}

Metrics metrics(const Formula& f) {
    Metrics m;
    for (AtomId a : var(f)) m.vars.insert(symbol_name(a));
    m.d = modal_depth(f);
    m.D = quantifier_depth(f);
    return m;
}

bool is_boolean(const Formula& f) {
    switch (f->op) {
        case Op::Atom:
            return true;
        case Op::Not:
            return is_boolean(f->l);
        case Op::And:
            return is_boolean(f->l) && is_boolean(f->r);
        default:
            return false;
    }
}

bool is_epistemic(const Formula& f) {
    switch (f->op) {
        case Op::Atom:
            return true;
        case Op::Not:
        case Op::Know:
            return is_epistemic(f->l);
        case Op::And:
            return is_epistemic(f->l) && is_epistemic(f->r);
        default:
            return false;
    }
}

bool is_aanf(const Formula& f) {
    switch (f->op) {
        case Op::Atom:
            return true;
        case Op::Not:
        case Op::Know:
            return is_aanf(f->l);
        case Op::And:
            return is_aanf(f->l) && is_aanf(f->r);
        case Op::Ann:
            return f->r->op == Op::Box && is_aanf(f->l) && is_aanf(f->r->l);
        case Op::Box:
            return false;
    }
    return false;
}

namespace {
void collect_sub(const Formula& f, std::set<Formula, FormulaLess>& out) {
    out.insert(f);
    switch (f->op) {
        case Op::Atom:
            return;
        case Op::Not:
        case Op::Know:
            collect_sub(f->l, out);
            return;
        case Op::And:
            collect_sub(f->l, out);
            collect_sub(f->r, out);
            return;
        case Op::Ann:
            collect_sub(f->l, out);
            collect_sub(f->r->l, out);
            return;
        case Op::Box:
            return;
    }
}

void collect_agents(const Formula& f, std::set<AgentId>& out) {
    if (f->op == Op::Know) out.insert(f->sym);
    if (f->l) collect_agents(f->l, out);
    if (f->r) collect_agents(f->r, out);
}
}  // namespace

std::vector<Formula> subformulas(const Formula& f) {
    if (!is_aanf(f)) throw NotAanf("subformulas: formula is not in AANF: " + to_string(f));
    std::set<Formula, FormulaLess> s;
    collect_sub(f, s);
    return {s.begin(), s.end()};
}

std::set<AgentId> agents_of(const Formula& f) {
    std::set<AgentId> out;
    collect_agents(f, out);
    return out;
}

}  // namespace bapal
