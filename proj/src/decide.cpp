#include "bapal/decide.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "bapal/bisim.hpp"
#include "bapal/check.hpp"
#include "bapal/normalform.hpp"

namespace bapal {

// ── colours ─────────────────────────────────────────────────────────────

namespace {

struct Ref {
    int idx;
    bool neg;
};

// Child references of each base, resolved once.
struct Plan {
    std::vector<int> opaque;           // Atom, Know and Ann bases
    std::vector<std::pair<Ref, Ref>> and_kids;  // per base; meaningful for And
    std::vector<Ref> know_kid;         // per base; meaningful for Know
    std::vector<int> and_order;        // And bases, children first
};

Ref ref_of(const ClosureTable& ct, const Formula& f) {
    auto loc = ct.locate(f);
    if (!loc) throw std::logic_error("closure is missing " + to_string(f));
    return {loc->first, loc->second};
}

Plan make_plan(const ClosureTable& ct) {
    Plan p;
    const std::size_t n = ct.bases.size();
    p.and_kids.resize(n, {{0, false}, {0, false}});
    p.know_kid.resize(n, {0, false});
    for (std::size_t i = 0; i < n; ++i) {
        const Formula& b = ct.bases[i];
        switch (b->op) {
            case Op::And:
                p.and_kids[i] = {ref_of(ct, b->l), ref_of(ct, b->r)};
                p.and_order.push_back(static_cast<int>(i));
                break;
            case Op::Know:
                p.know_kid[i] = ref_of(ct, b->l);
                p.opaque.push_back(static_cast<int>(i));
                break;
            default:
                p.opaque.push_back(static_cast<int>(i));
        }
    }
    // bases are ordered by size, so children precede parents already
    return p;
}

bool bit(const Colour& c, Ref r) { return (c[static_cast<std::size_t>(r.idx)] != 0) != r.neg; }

}  // namespace

bool colour_has(const ClosureTable& ct, const Colour& c, const Formula& f) {
    auto loc = ct.locate(f);
    if (!loc) throw std::invalid_argument("formula not in the closure: " + to_string(f));
    return (c[static_cast<std::size_t>(loc->first)] != 0) != loc->second;
}

bool is_maximal(const ClosureTable& ct, const Colour& c, std::string* why) {
    if (c.size() != ct.bases.size()) {
        if (why) *why = "colour has the wrong length";
        return false;
    }
    Plan p = make_plan(ct);
    for (int i : p.and_order) {
        auto [l, r] = p.and_kids[static_cast<std::size_t>(i)];
        if ((c[static_cast<std::size_t>(i)] != 0) != (bit(c, l) && bit(c, r))) {
            if (why) *why = "conjunction " + to_string(ct.bases[static_cast<std::size_t>(i)]) + " disagrees with its conjuncts";
            return false;
        }
    }
    for (std::size_t i = 0; i < ct.bases.size(); ++i)
        if (ct.bases[i]->op == Op::Know && c[i] && !bit(c, p.know_kid[i])) {
            if (why) *why = to_string(ct.bases[i]) + " without its argument";
            return false;
        }
    return true;
}

void for_each_colour(const ClosureTable& ct, const std::function<bool(const Colour&)>& fn) {
    Plan p = make_plan(ct);
    const std::size_t k = p.opaque.size();
    if (k >= 63) throw ResourceExhausted("states", std::to_string(k) + " independent closure formulas");
    Colour c(ct.bases.size(), 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        for (std::size_t i = 0; i < k; ++i) c[static_cast<std::size_t>(p.opaque[i])] = static_cast<char>((mask >> i) & 1u);
        for (int i : p.and_order) {
            auto [l, r] = p.and_kids[static_cast<std::size_t>(i)];
            c[static_cast<std::size_t>(i)] = static_cast<char>(bit(c, l) && bit(c, r));
        }
        bool ok = true;
        for (int i : p.opaque)
            if (ct.bases[static_cast<std::size_t>(i)]->op == Op::Know && c[static_cast<std::size_t>(i)] &&
                !bit(c, p.know_kid[static_cast<std::size_t>(i)])) {
                ok = false;
                break;
            }
        if (ok && !fn(c)) return;
    }
}

std::vector<Colour> maximal_colours(const ClosureTable& ct, std::size_t cap) {
    Plan p = make_plan(ct);
    if (p.opaque.size() >= 63 || (std::uint64_t{1} << p.opaque.size()) / 4 > cap * 64)
        throw ResourceExhausted("states", "2^" + std::to_string(p.opaque.size()) + " candidate colours");
    std::vector<Colour> out;
    for_each_colour(ct, [&](const Colour& c) {
        if (out.size() >= cap) throw ResourceExhausted("states", "more than " + std::to_string(cap) + " maximal sets");
        out.push_back(c);
        return true;
    });
    return out;
}

std::vector<Formula> colour_formulas(const ClosureTable& ct, const Colour& c) {
    std::vector<Formula> out;
    for (std::size_t i = 0; i < ct.bases.size(); ++i) out.push_back(c[i] ? ct.bases[i] : neg(ct.bases[i]));
    return out;
}

// ── atlas ───────────────────────────────────────────────────────────────

int HueAtlas::add(const std::string& name, const WorldSet& d) {
    names.push_back(name);
    denot.push_back(d);
    int id = static_cast<int>(names.size()) - 1;
    reverse.emplace(d, id);
    return id;
}

bool HueAtlas::realizes(const WorldSet& d) const {
    if (reverse.count(d)) return true;
    if (!boolean()) return false;
    for (const auto& g : generators)
        if (!g.subset_of(d) && g.intersects(d)) return false;
    return true;
}

std::vector<WorldSet> HueAtlas::containing(std::size_t s, std::size_t max_generators) const {
    std::set<WorldSet> out;
    for (const auto& d : denot)
        if (d.test(s)) out.insert(d);
    if (boolean()) {
        const WorldSet* own = nullptr;
        std::vector<const WorldSet*> rest;
        for (const auto& g : generators) {
            if (g.test(s)) own = &g;
            else if (!g.empty()) rest.push_back(&g);
        }
        if (own) {
            if (rest.size() + 1 > max_generators)
                throw ResourceExhausted("hue_denotations", std::to_string(rest.size() + 1) + " generators exceed the cap of " + std::to_string(max_generators));
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rest.size()); ++mask) {
                WorldSet u = *own;
                for (std::size_t i = 0; i < rest.size(); ++i)
                    if ((mask >> i) & 1u) u |= *rest[i];
                out.insert(std::move(u));
            }
        }
    }
    return {out.begin(), out.end()};
}

// ── pseudo-models ───────────────────────────────────────────────────────

WorldSet PseudoModel::members(const Formula& f) const {
    auto loc = ct->locate(f);
    if (!loc) throw std::invalid_argument("formula not in the closure: " + to_string(f));
    WorldSet out(size());
    for (std::size_t s = 0; s < size(); ++s)
        if ((colour[s][static_cast<std::size_t>(loc->first)] != 0) != loc->second) out.set(s);
    return out;
}

std::vector<std::string> PseudoModel::hue_of(int s) const {
    std::vector<std::string> out;
    auto u = static_cast<std::size_t>(s);
    for (std::size_t i = 0; i < atlas.names.size(); ++i)
        if (atlas.denot[i].test(u)) out.push_back(atlas.names[i]);
    for (std::size_t i = 0; i < atlas.generators.size(); ++i)
        if (atlas.generators[i].test(u)) out.push_back(atlas.gen_names[i]);
    return out;
}

int PseudoModel::state_index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    throw ModelError("unknown state '" + name + "'");
}

namespace {

const std::vector<int>* agent_blocks(const PseudoModel& p, AgentId a) {
    for (std::size_t i = 0; i < p.agents.size(); ++i)
        if (p.agents[i] == a) return &p.block[i];
    return nullptr;
}

bool same_block(const PseudoModel& p, AgentId a, std::size_t s, std::size_t t) {
    const auto* b = agent_blocks(p, a);
    return b ? (*b)[s] == (*b)[t] : s == t;
}

WorldSet remap(const WorldSet& d, const std::vector<std::size_t>& kept) {
    WorldSet out(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (d.test(kept[i])) out.set(i);
    return out;
}

// Prefix for generated hue names that cannot be read as a colour atom.
std::string hue_prefix(const ClosureTable& ct, const std::string& base = "h") {
    std::string prefix = base;
    auto clash = [&] {
        for (AtomId a : ct.atoms_col) {
            const std::string& t = symbol_name(a);
            if (t.rfind(prefix, 0) == 0 && t.size() > prefix.size() &&
                std::all_of(t.begin() + static_cast<long>(prefix.size()), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
                return true;
        }
        return false;
    };
    while (clash()) prefix += "_";
    return prefix;
}

std::vector<AgentId> sorted_agents(std::set<AgentId> s) {
    std::vector<AgentId> out(s.begin(), s.end());
    std::sort(out.begin(), out.end(), [](AgentId x, AgentId y) { return symbol_name(x) < symbol_name(y); });
    return out;
}

}  // namespace

Model to_kripke(const PseudoModel& p) {
    Model m;
    m.worlds = p.names;
    m.agents = p.agents;
    for (const auto& b : p.block) m.block.push_back(normalize_blocks(b));
    for (AtomId a : p.ct->atoms_col) m.valuation[a] = p.members(atom(a));
    for (std::size_t i = 0; i < p.atlas.names.size(); ++i) m.valuation[intern(p.atlas.names[i])] = p.atlas.denot[i];
    for (std::size_t i = 0; i < p.atlas.generators.size(); ++i) m.valuation[intern(p.atlas.gen_names[i])] = p.atlas.generators[i];
    return m;
}

PseudoModel restrict(const PseudoModel& p, const WorldSet& keep) {
    auto kept = keep.members();
    if (kept.empty()) throw ModelError("restriction leaves no state");
    PseudoModel out;
    out.ct = p.ct;
    out.agents = p.agents;
    for (std::size_t s : kept) {
        out.names.push_back(p.names[s]);
        out.colour.push_back(p.colour[s]);
    }
    for (const auto& b : p.block) {
        std::vector<int> nb;
        for (std::size_t s : kept) nb.push_back(b[s]);
        out.block.push_back(normalize_blocks(nb));
    }
    for (std::size_t i = 0; i < p.atlas.names.size(); ++i) out.atlas.add(p.atlas.names[i], remap(p.atlas.denot[i], kept));
    for (std::size_t i = 0; i < p.atlas.generators.size(); ++i) {
        WorldSet g = remap(p.atlas.generators[i], kept);
        if (g.empty()) continue;
        out.atlas.generators.push_back(std::move(g));
        out.atlas.gen_names.push_back(p.atlas.gen_names[i]);
    }
    return out;
}

PseudoModel syntactic_restriction(const PseudoModel& p, const Formula& alpha, const WorldSet& hue) {
    if (hue.empty()) throw ModelError("hue atom with empty denotation");
    return restrict(p, p.members(alpha) & hue);
}

PseudoModel syntactic_restriction(const PseudoModel& p, const Formula& alpha, const std::string& hue_atom) {
    for (std::size_t i = 0; i < p.atlas.names.size(); ++i)
        if (p.atlas.names[i] == hue_atom) return syntactic_restriction(p, alpha, p.atlas.denot[i]);
    for (std::size_t i = 0; i < p.atlas.gen_names.size(); ++i)
        if (p.atlas.gen_names[i] == hue_atom) return syntactic_restriction(p, alpha, p.atlas.generators[i]);
    throw ModelError("unknown hue atom '" + hue_atom + "'");
}

// ── clauses ─────────────────────────────────────────────────────────────

std::vector<ClauseReport> validate(const PseudoModel& p) {
    const ClosureTable& ct = *p.ct;
    std::vector<ClauseReport> out;
    for (int c = 1; c <= 6; ++c) out.push_back({c, true, std::nullopt, ""});
    auto fail = [&](int c, std::optional<int> s, std::string why) {
        auto& r = out[static_cast<std::size_t>(c - 1)];
        if (!r.ok) return;
        r.ok = false;
        r.state = s;
        r.detail = std::move(why);
    };

    for (std::size_t s = 0; s < p.size(); ++s) {
        std::string why;
        if (!is_maximal(ct, p.colour[s], &why)) fail(1, static_cast<int>(s), why);
    }

    Plan plan = make_plan(ct);
    std::set<AgentId> ags(p.agents.begin(), p.agents.end());
    for (const auto& b : ct.bases)
        if (b->op == Op::Know) ags.insert(b->sym);
    for (AgentId a : ags) {
        for (std::size_t s = 0; s < p.size(); ++s)
            for (std::size_t t = s + 1; t < p.size(); ++t) {
                if (!same_block(p, a, s, t)) continue;
                for (std::size_t i = 0; i < ct.bases.size(); ++i)
                    if (ct.bases[i]->op == Op::Know && ct.bases[i]->sym == a && p.colour[s][i] != p.colour[t][i])
                        fail(2, static_cast<int>(s), p.names[s] + " and " + p.names[t] + " disagree on " + to_string(ct.bases[i]));
            }
    }

    for (std::size_t s = 0; s < p.size(); ++s)
        for (std::size_t i = 0; i < ct.bases.size(); ++i) {
            if (ct.bases[i]->op != Op::Know || p.colour[s][i]) continue;
            AgentId a = ct.bases[i]->sym;
            bool found = false;
            for (std::size_t t = 0; t < p.size() && !found; ++t)
                found = same_block(p, a, s, t) && !bit(p.colour[t], plan.know_kid[i]);
            if (!found) fail(3, static_cast<int>(s), "no " + symbol_name(a) + "-neighbour refutes " + to_string(ct.bases[i]->l));
        }

    {
        Model k = to_kripke(p);
        std::set<AtomId> allowed(ct.atoms_col.begin(), ct.atoms_col.end());
        for (const auto& n : p.atlas.names) allowed.insert(intern(n));
        for (const auto& n : p.atlas.gen_names) allowed.insert(intern(n));
        for (const auto& [a, d] : k.valuation) {
            if (!allowed.count(a) && !d.empty()) fail(4, std::nullopt, "atom " + symbol_name(a) + " is neither colour nor hue");
            if (std::find(ct.atoms_col.begin(), ct.atoms_col.end(), a) != ct.atoms_col.end())
                for (std::size_t s = 0; s < p.size(); ++s)
                    if (d.test(s) != p.has(static_cast<int>(s), atom(a))) fail(4, static_cast<int>(s), "valuation of " + symbol_name(a));
        }
        for (const auto& n : p.atlas.names)
            if (std::find_if(ct.atoms_col.begin(), ct.atoms_col.end(), [&](AtomId a) { return symbol_name(a) == n; }) != ct.atoms_col.end())
                fail(4, std::nullopt, "hue atom " + n + " is also a colour atom");
    }

    {
        std::map<std::vector<char>, WorldSet> cls;
        for (std::size_t s = 0; s < p.size(); ++s) {
            std::vector<char> key;
            for (AtomId a : ct.atoms_col) key.push_back(p.has(static_cast<int>(s), atom(a)));
            cls.try_emplace(key, WorldSet(p.size())).first->second.set(s);
        }
        std::vector<WorldSet> parts;
        for (auto& [k, w] : cls) parts.push_back(w);
        if (parts.size() > 20) {
            fail(5, std::nullopt, "too many colour classes to enumerate");
        } else {
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << parts.size()); ++mask) {
                WorldSet u(p.size());
                for (std::size_t i = 0; i < parts.size(); ++i)
                    if ((mask >> i) & 1u) u |= parts[i];
                if (!p.atlas.realizes(u)) {
                    std::optional<int> witness;
                    if (!u.empty()) witness = static_cast<int>(u.members().front());
                    fail(5, witness, "no hue atom for a union of " + std::to_string(u.count()) + " states");
                    break;
                }
            }
        }
    }

    {
        // Named atoms that are generator unions are closed automatically.
        std::vector<WorldSet> odd;
        for (const auto& d : p.atlas.denot) {
            bool gen_union = p.atlas.boolean();
            if (gen_union)
                for (const auto& g : p.atlas.generators)
                    if (!g.subset_of(d) && g.intersects(d)) gen_union = false;
            if (!gen_union) odd.push_back(d);
        }
        if (!odd.empty()) {
            std::vector<WorldSet> fam = odd;
            if (p.atlas.boolean()) {
                if (p.atlas.generators.size() > 16) {
                    fail(6, std::nullopt, "too many generators to enumerate");
                } else {
                    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p.atlas.generators.size()); ++mask) {
                        WorldSet u(p.size());
                        for (std::size_t i = 0; i < p.atlas.generators.size(); ++i)
                            if ((mask >> i) & 1u) u |= p.atlas.generators[i];
                        fam.push_back(u);
                    }
                }
            }
            for (const auto& x : odd)
                for (const auto& y : fam) {
                    if (!p.atlas.realizes(x | y)) fail(6, std::nullopt, "union of two hue denotations is missing");
                    if (!p.atlas.realizes(x & y)) fail(6, std::nullopt, "intersection of two hue denotations is missing");
                }
        }
    }
    return out;
}

bool valid(const PseudoModel& p) {
    for (const auto& r : validate(p))
        if (!r.ok) return false;
    return true;
}

const char* to_string(Tri t) {
    switch (t) {
        case Tri::False: return "false";
        case Tri::True: return "true";
        case Tri::Unknown: return "unknown";
    }
    return "?";
}

// ── consistency ─────────────────────────────────────────────────────────

namespace {

Tri both(Tri a, Tri b) {
    if (a == Tri::False || b == Tri::False) return Tri::False;
    if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
    return Tri::True;
}

// Evaluates the consistency clause on a pseudo-model P. P is read as the
// Kripke model K; a witness for (alpha, hue) at sigma is the image of K
// restricted to the announced states, whose colours are truths in that
// restriction. Images are identified by their state set W, so nested
// witnesses are memoized on (W, n).
class Consistency {
public:
    Consistency(const PseudoModel& p, const ConsistencyOptions& opt)
        : p_(p), k_(to_kripke(p)), chk_(k_, opt.deadline, opt.max_generators), opt_(opt) {
        for (std::size_t i = 0; i < p.ct->bases.size(); ++i)
            if (p.ct->bases[i]->op == Op::Ann) boxes_.push_back({static_cast<int>(i), quantifier_depth(p.ct->bases[i])});
    }

    Tri state(int s, int n) {
        Tri acc = Tri::True;
        for (const auto& [b, D] : boxes_) {
            if (D > n) continue;
            acc = both(acc, top_clause(s, b, n));
            if (acc == Tri::False) return acc;
        }
        return acc;
    }

    Tri all(int n) {
        if (n <= 0) return Tri::True;
        Tri acc = Tri::True;
        for (std::size_t s = 0; s < p_.size(); ++s) {
            acc = both(acc, state(static_cast<int>(s), n));
            if (acc == Tri::False) return acc;
        }
        return acc;
    }

    Tri image(const WorldSet& W, int n) {
        if (n <= 0) return Tri::True;
        auto key = std::make_pair(W, n);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        Tri acc = Tri::True;
        for (std::size_t s : W.members()) {
            for (const auto& [b, D] : boxes_) {
                if (D > n) continue;
                const Formula& f = p_.ct->bases[static_cast<std::size_t>(b)];
                bool lhs = chk_.holds_in(W, static_cast<int>(s), f);
                WorldSet A = chk_.extension(W, f->l);
                Tri rhs = Tri::True;
                if (A.test(s))
                    for (const auto& U : classes_in(A, s)) {
                        rhs = both(rhs, witness(U, static_cast<int>(s), f->r->l, n));
                        if (rhs == Tri::False) break;
                    }
                acc = both(acc, rhs == Tri::Unknown ? Tri::Unknown : (lhs == (rhs == Tri::True) ? Tri::True : Tri::False));
                if (acc == Tri::False) break;
            }
            if (acc == Tri::False) break;
        }
        memo_.emplace(key, acc);
        return acc;
    }

    // A witness at level n must be (n-1)-consistent and hold psi at s.
    Tri witness(const WorldSet& W, int s, const Formula& psi, int n) {
        if (++nodes_ > opt_.max_nodes) throw ResourceExhausted("recursion_nodes", "more than " + std::to_string(opt_.max_nodes) + " witness evaluations");
        if (opt_.deadline) opt_.deadline->poll();
        if (!chk_.holds_in(W, s, psi)) return quantifier_depth(psi) == 0 ? Tri::False : Tri::Unknown;
        return image(W, n - 1) == Tri::True ? Tri::True : Tri::Unknown;
    }

    Checker& checker() { return chk_; }
    const Model& kripke() const { return k_; }

private:
    Tri top_clause(int s, int b, int n) {
        const Formula& f = p_.ct->bases[static_cast<std::size_t>(b)];
        bool lhs = p_.has_base(s, b);
        const Formula& alpha = f->l;
        Tri rhs = Tri::True;
        if (p_.has(s, alpha)) {
            WorldSet A = p_.members(alpha);
            std::set<WorldSet> seen;
            for (const auto& U : p_.atlas.containing(static_cast<std::size_t>(s), opt_.max_generators)) {
                WorldSet W = A & U;
                if (!seen.insert(W).second) continue;
                rhs = both(rhs, witness(W, s, f->r->l, n));
                if (rhs == Tri::False) break;
            }
        }
        if (rhs == Tri::Unknown) return Tri::Unknown;
        return lhs == (rhs == Tri::True) ? Tri::True : Tri::False;
    }

    // Unions of valuation classes of K inside A that contain s.
    std::vector<WorldSet> classes_in(const WorldSet& A, std::size_t s) {
        std::map<std::vector<char>, WorldSet> cls;
        for (std::size_t w : A.members()) {
            std::vector<char> key;
            for (const auto& [a, d] : k_.valuation) key.push_back(d.test(w));
            cls.try_emplace(key, WorldSet(k_.size())).first->second.set(w);
        }
        const WorldSet* own = nullptr;
        std::vector<const WorldSet*> rest;
        for (const auto& [k, w] : cls) {
            if (w.test(s)) own = &w;
            else rest.push_back(&w);
        }
        if (rest.size() + 1 > opt_.max_generators)
            throw ResourceExhausted("classes", std::to_string(rest.size() + 1) + " valuation classes exceed the cap");
        std::vector<WorldSet> out;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << rest.size()); ++mask) {
            WorldSet u = *own;
            for (std::size_t i = 0; i < rest.size(); ++i)
                if ((mask >> i) & 1u) u |= *rest[i];
            out.push_back(std::move(u));
        }
        return out;
    }

    struct KeyHash {
        std::size_t operator()(const std::pair<WorldSet, int>& k) const noexcept { return k.first.hash() * 31 + static_cast<std::size_t>(k.second); }
    };

    const PseudoModel& p_;
    Model k_;
    Checker chk_;
    ConsistencyOptions opt_;
    std::vector<std::pair<int, int>> boxes_;  // (base index, D)
    std::unordered_map<std::pair<WorldSet, int>, Tri, KeyHash> memo_;
    std::size_t nodes_ = 0;
};

// Image of K restricted to W, as a pseudo-model over the same closure.
PseudoModel image_of(const PseudoModel& p, Checker& chk, const WorldSet& W) {
    PseudoModel out = restrict(p, W);
    auto kept = W.members();
    std::vector<WorldSet> ext;
    for (const auto& b : p.ct->bases) ext.push_back(remap(chk.extension(W, b), kept));
    for (std::size_t s = 0; s < kept.size(); ++s)
        for (std::size_t i = 0; i < ext.size(); ++i) out.colour[s][i] = static_cast<char>(ext[i].test(s));
    // generators become the valuation classes of the restriction; generator
    // atoms of p that no longer are classes stay on as named atoms
    Model k = to_kripke(out);
    auto classes = valuation_classes(k);
    HueAtlas atlas;
    for (std::size_t i = 0; i < out.atlas.names.size(); ++i) atlas.add(out.atlas.names[i], out.atlas.denot[i]);
    std::set<std::string> used(out.atlas.names.begin(), out.atlas.names.end());
    std::vector<char> reused(out.atlas.generators.size(), 0);
    std::string prefix = hue_prefix(*p.ct, "k");
    int fresh = 0;
    for (const auto& c : classes) {
        std::string name;
        for (std::size_t i = 0; i < out.atlas.generators.size(); ++i)
            if (out.atlas.generators[i] == c.members) {
                name = out.atlas.gen_names[i];
                reused[i] = 1;
            }
        while (name.empty() || used.count(name)) name = prefix + std::to_string(fresh++);
        used.insert(name);
        atlas.generators.push_back(c.members);
        atlas.gen_names.push_back(name);
    }
    for (std::size_t i = 0; i < out.atlas.generators.size(); ++i)
        if (!reused[i]) atlas.add(out.atlas.gen_names[i], out.atlas.generators[i]);
    out.atlas = std::move(atlas);
    return out;
}

}  // namespace

Tri consistent(const PseudoModel& p, int n, const ConsistencyOptions& opt) {
    if (n <= 0) return Tri::True;
    Consistency c(p, opt);
    return c.all(n);
}

std::optional<Witness> find_witness(const PseudoModel& p, int sigma, const Formula& alpha, const WorldSet& hue,
                                    const Formula& psi, int n, const ConsistencyOptions& opt) {
    auto s = static_cast<std::size_t>(sigma);
    WorldSet W = p.members(alpha) & hue;
    if (!W.test(s)) return std::nullopt;
    Consistency c(p, opt);
    if (c.witness(W, sigma, psi, n) != Tri::True) return std::nullopt;
    Witness w;
    w.model = image_of(p, c.checker(), W);
    auto kept = W.members();
    w.state = static_cast<int>(std::find(kept.begin(), kept.end(), s) - kept.begin());
    PseudoModel r = syntactic_restriction(p, alpha, hue);
    Model kr = to_kripke(r);
    std::set<AtomId> q;
    for (const auto& [a, d] : kr.valuation) q.insert(a);
    if (!q_bisimilar(q, to_kripke(w.model), w.state, kr, w.state)) return std::nullopt;
    return w;
}

// ── images ──────────────────────────────────────────────────────────────

PseudoModel phi_image(const Model& m, const std::shared_ptr<const ClosureTable>& ct) {
    Checker chk(m);
    PseudoModel p;
    p.ct = ct;
    p.names = m.worlds;
    p.agents = m.agents;
    p.block = m.block;
    std::vector<WorldSet> ext;
    for (const auto& b : ct->bases) ext.push_back(chk.extension(b));
    for (std::size_t w = 0; w < m.size(); ++w) {
        Colour c(ct->bases.size(), 0);
        for (std::size_t i = 0; i < ext.size(); ++i) c[i] = static_cast<char>(ext[i].test(w));
        p.colour.push_back(std::move(c));
    }
    std::string prefix = hue_prefix(*ct);
    int i = 0;
    for (const auto& c : valuation_classes(m)) {
        p.atlas.generators.push_back(c.members);
        p.atlas.gen_names.push_back(prefix + std::to_string(i++));
    }
    return p;
}

PseudoModel phi_image(const Model& m, const Formula& f) {
    Formula g = is_aanf(f) ? f : to_aanf(f).first;
    return phi_image(m, std::make_shared<const ClosureTable>(closure_formulas(g)));
}

// ── actualisation ───────────────────────────────────────────────────────

std::vector<int> first_primes(std::size_t k) {
    std::vector<int> out;
    for (int c = 2; out.size() < k; ++c) {
        bool prime = true;
        for (int q : out) {
            if (q * q > c) break;
            if (c % q == 0) {
                prime = false;
                break;
            }
        }
        if (prime) out.push_back(c);
    }
    return out;
}

int deg(int prime, int n) {
    if (prime < 2 || n < 1) throw std::invalid_argument("deg: needs a prime and a positive integer");
    int i = 0;
    while (n % prime == 0) {
        n /= prime;
        ++i;
    }
    return i;
}

Model actualise(const PseudoModel& p, const ActualiseOptions& opt) {
    if (opt.copies < 1) throw std::invalid_argument("actualise: copies must be positive");
    std::vector<std::string> hue_names = p.atlas.names;
    std::vector<WorldSet> hue = p.atlas.denot;
    bool truncated_hue = false;
    if (p.atlas.boolean()) {
        const auto& g = p.atlas.generators;
        if (g.size() >= 63) throw ResourceExhausted("hue_denotations", "too many generators");
        std::set<WorldSet> seen(hue.begin(), hue.end());
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << g.size()); ++mask) {
            if (hue.size() >= opt.max_hue) {
                truncated_hue = true;
                break;
            }
            WorldSet u(p.size());
            std::string name;
            for (std::size_t i = 0; i < g.size(); ++i)
                if ((mask >> i) & 1u) {
                    u |= g[i];
                    name += (name.empty() ? "" : "+") + p.atlas.gen_names[i];
                }
            if (!seen.insert(u).second) continue;
            hue.push_back(u);
            hue_names.push_back(name);
        }
    }
    const std::size_t S = p.size();
    const auto primes = first_primes(hue.size());
    Model m;
    for (int n = 1; n <= opt.copies; ++n)
        for (std::size_t s = 0; s < S; ++s) m.worlds.push_back("(" + p.names[s] + "," + std::to_string(n) + ")");
    m.agents = p.agents;
    for (const auto& b : p.block) {
        std::vector<int> nb;
        for (int n = 1; n <= opt.copies; ++n) nb.insert(nb.end(), b.begin(), b.end());
        m.block.push_back(normalize_blocks(nb));
    }
    const std::size_t W = m.worlds.size();
    auto world = [&](std::size_t s, int n) { return static_cast<std::size_t>(n - 1) * S + s; };
    for (AtomId a : p.ct->atoms_col) {
        WorldSet d(W), src = p.members(atom(a));
        for (int n = 1; n <= opt.copies; ++n) src.for_each([&](std::size_t s) { d.set(world(s, n)); });
        m.valuation[a] = d;
    }
    for (const auto& n : p.atlas.names) m.valuation[intern(n)] = WorldSet(W);
    for (const auto& n : p.atlas.gen_names) m.valuation[intern(n)] = WorldSet(W);
    for (std::size_t j = 0; j < hue.size(); ++j)
        for (int i = 1; i <= opt.act_limit; ++i) {
            WorldSet d(W);
            for (int n = 1; n <= opt.copies; ++n)
                if (deg(primes[j], i) == deg(primes[j], n)) hue[j].for_each([&](std::size_t s) { d.set(world(s, n)); });
            m.valuation[intern("q" + std::to_string(j) + "_" + std::to_string(i))] = d;
        }
    m.meta["copies"] = std::to_string(opt.copies);
    m.meta["act_limit"] = std::to_string(opt.act_limit);
    std::string order;
    for (std::size_t j = 0; j < hue.size(); ++j) order += (j ? "," : "") + hue_names[j] + ":" + std::to_string(primes[j]);
    m.meta["hue_primes"] = order;
    m.meta["truncated"] = "worlds beyond copy " + std::to_string(opt.copies) + " and act atoms beyond index " + std::to_string(opt.act_limit) + " omitted";
    if (truncated_hue) m.meta["hue_truncated"] = "only the first " + std::to_string(opt.max_hue) + " hue denotations were enumerated";
    m.validate();
    return m;
}

Model actualise(const PseudoModel& p, int copies) {
    ActualiseOptions o;
    o.copies = copies;
    return actualise(p, o);
}

// ── satisfiability ──────────────────────────────────────────────────────

const char* to_string(Engine e) { return e == Engine::Pruned ? "pruned" : "faithful"; }

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Sat: return "sat";
        case Outcome::Unsat: return "unsat";
        case Outcome::ResourceExhausted: return "resource_exhausted";
    }
    return "?";
}

namespace {

struct Ctx {
    std::shared_ptr<const ClosureTable> ct;
    Plan plan;
    std::vector<AgentId> agents;
    std::vector<std::vector<int>> know_of;  // per agent, Know bases
    std::string prefix;
};

Ctx make_ctx(const Formula& nf) {
    Ctx c;
    c.ct = std::make_shared<const ClosureTable>(closure_formulas(nf));
    c.plan = make_plan(*c.ct);
    std::set<AgentId> ags = agents_of(c.ct->root);
    c.agents = sorted_agents(ags);
    for (AgentId a : c.agents) {
        std::vector<int> ks;
        for (std::size_t i = 0; i < c.ct->bases.size(); ++i)
            if (c.ct->bases[i]->op == Op::Know && c.ct->bases[i]->sym == a) ks.push_back(static_cast<int>(i));
        c.know_of.push_back(std::move(ks));
    }
    c.prefix = hue_prefix(*c.ct);
    return c;
}

std::vector<char> ksig(const Ctx& c, std::size_t a, const Colour& col) {
    std::vector<char> k;
    for (int i : c.know_of[a]) k.push_back(col[static_cast<std::size_t>(i)]);
    return k;
}

std::vector<char> col_key(const Ctx& c, const Colour& col) {
    std::vector<char> k;
    for (AtomId a : c.ct->atoms_col) k.push_back(colour_has(*c.ct, col, atom(a)));
    return k;
}

// Greatest subset closed under the diamond clause, with relations given by
// agreement on each agent's knowledge formulas.
std::vector<Colour> eliminate(const Ctx& c, std::vector<Colour> S, const Deadline* dl) {
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<char> dead(S.size(), 0);
        for (std::size_t a = 0; a < c.agents.size(); ++a) {
            std::map<std::vector<char>, std::vector<std::size_t>> cls;
            for (std::size_t s = 0; s < S.size(); ++s) cls[ksig(c, a, S[s])].push_back(s);
            for (const auto& [k, mem] : cls)
                for (int b : c.know_of[a]) {
                    Ref kid = c.plan.know_kid[static_cast<std::size_t>(b)];
                    bool refuter = std::any_of(mem.begin(), mem.end(), [&](std::size_t t) { return !bit(S[t], kid); });
                    if (refuter) continue;
                    for (std::size_t s : mem)
                        if (!S[s][static_cast<std::size_t>(b)]) dead[s] = 1;
                }
            if (dl) dl->poll();
        }
        std::vector<Colour> keep;
        for (std::size_t s = 0; s < S.size(); ++s)
            if (!dead[s]) keep.push_back(std::move(S[s]));
        changed = keep.size() != S.size();
        S = std::move(keep);
    }
    return S;
}

enum class AtlasMode { Coarse, Fine };

PseudoModel build(const Ctx& c, const std::vector<Colour>& S, AtlasMode mode) {
    PseudoModel p;
    p.ct = c.ct;
    p.colour = S;
    for (std::size_t s = 0; s < S.size(); ++s) p.names.push_back("s" + std::to_string(s));
    p.agents = c.agents;
    for (std::size_t a = 0; a < c.agents.size(); ++a) {
        std::map<std::vector<char>, int> ids;
        std::vector<int> b;
        for (const auto& col : S) b.push_back(ids.emplace(ksig(c, a, col), static_cast<int>(ids.size())).first->second);
        p.block.push_back(b);
    }
    if (mode == AtlasMode::Coarse) {
        std::map<std::vector<char>, WorldSet> cls;
        std::vector<std::vector<char>> order;
        for (std::size_t s = 0; s < S.size(); ++s) {
            auto k = col_key(c, S[s]);
            auto [it, fresh] = cls.try_emplace(k, WorldSet(S.size()));
            if (fresh) order.push_back(k);
            it->second.set(s);
        }
        for (const auto& k : order) {
            p.atlas.gen_names.push_back(c.prefix + std::to_string(p.atlas.generators.size()));
            p.atlas.generators.push_back(cls.at(k));
        }
    } else {
        for (std::size_t s = 0; s < S.size(); ++s) {
            WorldSet g(S.size());
            g.set(s);
            p.atlas.gen_names.push_back(c.prefix + std::to_string(s));
            p.atlas.generators.push_back(std::move(g));
        }
    }
    return p;
}

bool has_root(const Ctx& c, const Colour& col) { return colour_has(*c.ct, col, c.ct->root); }

// Smallest component around the first root state that still checks out.
std::optional<std::pair<PseudoModel, int>> finish(const Ctx& c, const PseudoModel& p, const ConsistencyOptions& co) {
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (!has_root(c, p.colour[s])) continue;
        WorldSet comp = generated(to_kripke(p), static_cast<int>(s));
        PseudoModel small = restrict(p, comp);
        auto kept = comp.members();
        int at = static_cast<int>(std::find(kept.begin(), kept.end(), s) - kept.begin());
        if (valid(small) && consistent(small, c.ct->D, co) == Tri::True) return std::make_pair(small, at);
    }
    if (valid(p) && consistent(p, c.ct->D, co) == Tri::True)
        for (std::size_t s = 0; s < p.size(); ++s)
            if (has_root(c, p.colour[s])) return std::make_pair(p, static_cast<int>(s));
    return std::nullopt;
}

void pruned(const Ctx& c, const Budget& b, const Deadline& dl, SatVerdict& v) {
    auto colours = maximal_colours(*c.ct, b.max_states);
    v.candidates = colours.size();
    auto S0 = eliminate(c, colours, &dl);
    if (std::none_of(S0.begin(), S0.end(), [&](const Colour& col) { return has_root(c, col); })) {
        v.outcome = Outcome::Unsat;
        v.detail = "no maximal set containing the formula survives the diamond clause";
        return;
    }
    ConsistencyOptions co{&dl, b.max_nodes, b.max_generators};
    std::string why = "no consistent pseudo-model found among the tried hue atlases";
    for (AtlasMode mode : {AtlasMode::Coarse, AtlasMode::Fine}) {
        auto S = S0;
        try {
            for (;;) {
                if (S.empty()) break;
                if (mode == AtlasMode::Fine && S.size() > b.max_generators) throw ResourceExhausted("hue_denotations", "too many states for singleton hue generators");
                PseudoModel p = build(c, S, mode);
                Consistency con(p, co);
                std::vector<Colour> keep;
                for (std::size_t s = 0; s < S.size(); ++s)
                    if (c.ct->D == 0 || con.state(static_cast<int>(s), c.ct->D) == Tri::True) keep.push_back(S[s]);
                if (keep.size() == S.size()) break;
                S = eliminate(c, std::move(keep), &dl);
            }
            if (S.empty()) continue;
            if (auto r = finish(c, build(c, S, mode), co)) {
                v.outcome = Outcome::Sat;
                v.witness = r->first;
                v.state = r->second;
                return;
            }
        } catch (const ResourceExhausted& e) {
            if (e.dimension() == "wall_time") throw;
            why = e.what();
            v.exhausted = e.dimension();
        }
    }
    v.outcome = Outcome::ResourceExhausted;
    if (v.exhausted.empty()) v.exhausted = "search";
    v.detail = why;
}

// Restricted growth strings: calls fn with a block id per element.
bool for_each_partition(std::size_t n, const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> a(n, 0);
    if (n == 0) return fn(a);
    std::function<bool(std::size_t, int)> go = [&](std::size_t i, int mx) -> bool {
        if (i == n) return fn(a);
        for (int v = 0; v <= mx + 1; ++v) {
            a[i] = v;
            if (!go(i + 1, std::max(mx, v))) return false;
        }
        return true;
    };
    a[0] = 0;
    return go(1, 0);
}

// Every partition of `items` refining the grouping `key`, as block ids.
bool for_each_refinement(const std::vector<int>& key, const std::function<bool(const std::vector<int>&)>& fn) {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < key.size(); ++i) groups[key[i]].push_back(i);
    std::vector<std::vector<std::size_t>> gs;
    for (auto& [k, g] : groups) gs.push_back(g);
    std::vector<int> out(key.size(), 0);
    std::function<bool(std::size_t, int)> go = [&](std::size_t gi, int base) -> bool {
        if (gi == gs.size()) return fn(out);
        const auto& g = gs[gi];
        return for_each_partition(g.size(), [&](const std::vector<int>& rg) {
            int mx = 0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                out[g[j]] = base + rg[j];
                mx = std::max(mx, rg[j]);
            }
            return go(gi + 1, base + mx + 1);
        });
    };
    return go(0, 0);
}

void faithful(const Ctx& c, const Budget& b, const Deadline& dl, SatVerdict& v) {
    auto colours = maximal_colours(*c.ct, b.max_states);
    const std::size_t k = colours.size();
    if (k > 20) throw ResourceExhausted("states", std::to_string(k) + " maximal sets are too many for literal enumeration");
    ConsistencyOptions co{&dl, b.max_nodes, b.max_generators};
    bool unknown = false;
    std::size_t structures = 0;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
        std::vector<Colour> S;
        for (std::size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1u) S.push_back(colours[i]);
        if (std::none_of(S.begin(), S.end(), [&](const Colour& col) { return has_root(c, col); })) continue;
        PseudoModel base = build(c, S, AtlasMode::Coarse);
        std::vector<std::vector<int>> chosen(c.agents.size());
        std::optional<std::pair<PseudoModel, int>> found;
        std::function<bool(std::size_t)> agent = [&](std::size_t a) -> bool {
            if (a == c.agents.size()) {
                PseudoModel p = base;
                p.block = chosen;
                auto check = [&](const PseudoModel& q) {
                    if (++structures > b.max_nodes) throw ResourceExhausted("recursion_nodes", "more than " + std::to_string(b.max_nodes) + " candidate structures");
                    dl.poll();
                    if (!valid(q)) return true;
                    Tri t = consistent(q, c.ct->D, co);
                    if (t == Tri::Unknown) unknown = true;
                    if (t != Tri::True) return true;
                    for (std::size_t s = 0; s < q.size(); ++s)
                        if (has_root(c, q.colour[s])) {
                            found = std::make_pair(q, static_cast<int>(s));
                            return false;
                        }
                    return true;
                };
                if (c.ct->D == 0) return check(p);
                // hue generators: every partition refining the colour classes
                std::vector<int> key;
                std::map<std::vector<char>, int> ids;
                for (const auto& col : S) key.push_back(ids.emplace(col_key(c, col), static_cast<int>(ids.size())).first->second);
                return for_each_refinement(key, [&](const std::vector<int>& g) {
                    PseudoModel q = p;
                    q.atlas = HueAtlas{};
                    int blocks = *std::max_element(g.begin(), g.end()) + 1;
                    for (int i = 0; i < blocks; ++i) {
                        WorldSet w(S.size());
                        for (std::size_t s = 0; s < S.size(); ++s)
                            if (g[s] == i) w.set(s);
                        q.atlas.gen_names.push_back(c.prefix + std::to_string(i));
                        q.atlas.generators.push_back(w);
                    }
                    return check(q);
                });
            }
            return for_each_refinement(base.block[a], [&](const std::vector<int>& part) {
                chosen[a] = part;
                return agent(a + 1);
            });
        };
        agent(0);
        if (found) {
            v.outcome = Outcome::Sat;
            v.witness = found->first;
            v.state = found->second;
            v.candidates = structures;
            return;
        }
    }
    v.candidates = structures;
    if (c.ct->D == 0) {
        v.outcome = Outcome::Unsat;
        v.detail = "no structure over distinct maximal sets satisfies the clauses";
    } else {
        // repeated colours with different hues are outside the enumerated space
        v.outcome = Outcome::ResourceExhausted;
        v.exhausted = unknown ? "witness" : "search";
        v.detail = "literal enumeration over distinct colours found no consistent pseudo-model";
    }
}

}  // namespace

SatVerdict satisfiable(const Formula& f, Engine engine, const Budget& b) {
    SatVerdict v;
    v.engine = engine;
    v.normal = canonical(to_aanf(f).first);
    Deadline dl(b.seconds);
    try {
        Ctx c = make_ctx(v.normal);
        if (engine == Engine::Pruned) pruned(c, b, dl, v);
        else faithful(c, b, dl, v);
    } catch (const ResourceExhausted& e) {
        v.outcome = Outcome::ResourceExhausted;
        v.exhausted = e.dimension();
        v.detail = e.what();
        v.witness.reset();
        v.state = -1;
    }
    return v;
}

// ── output ──────────────────────────────────────────────────────────────

nlohmann::json to_json(const PseudoModel& p) {
    nlohmann::json j = to_json(to_kripke(p));
    nlohmann::json col = nlohmann::json::object(), hue = nlohmann::json::object();
    for (std::size_t s = 0; s < p.size(); ++s) {
        std::vector<std::string> fs;
        for (const auto& f : colour_formulas(*p.ct, p.colour[s])) fs.push_back(to_string(f));
        col[p.names[s]] = fs;
        hue[p.names[s]] = p.hue_of(static_cast<int>(s));
    }
    j["colour"] = col;
    j["hue"] = hue;
    j["generators"] = p.atlas.gen_names;
    j["formula"] = to_string(p.ct->root);
    return j;
}

PseudoModel pseudo_model_from_json(const nlohmann::json& j) {
    try {
        Formula f = parse(j.at("formula").get<std::string>());
        if (!is_aanf(f)) throw ModelError("pseudo-model formula is not in AANF");
        auto ct = std::make_shared<const ClosureTable>(closure_formulas(f));
        Model k = model_from_json(j);
        PseudoModel p;
        p.ct = ct;
        p.names = k.worlds;
        p.agents = k.agents;
        p.block = k.block;
        const auto& cols = j.at("colour");
        for (const auto& w : k.worlds) {
            Colour c(ct->bases.size(), 0);
            std::vector<char> seen(ct->bases.size(), 0);
            for (const auto& s : cols.at(w)) {
                auto loc = ct->locate(parse(s.get<std::string>()));
                if (!loc) throw ModelError("colour of " + w + " lists a formula outside the closure");
                c[static_cast<std::size_t>(loc->first)] = static_cast<char>(!loc->second);
                seen[static_cast<std::size_t>(loc->first)] = 1;
            }
            if (std::count(seen.begin(), seen.end(), 0)) throw ModelError("colour of " + w + " is incomplete");
            p.colour.push_back(std::move(c));
        }
        std::set<std::string> gens;
        if (j.contains("generators")) gens = j.at("generators").get<std::set<std::string>>();
        std::set<AtomId> col(ct->atoms_col.begin(), ct->atoms_col.end());
        for (const auto& [a, d] : k.valuation) {
            if (col.count(a)) continue;
            const std::string& n = symbol_name(a);
            if (gens.count(n)) {
                p.atlas.gen_names.push_back(n);
                p.atlas.generators.push_back(d);
            } else {
                p.atlas.add(n, d);
            }
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed pseudo-model JSON: ") + e.what());
    } catch (const ParseError& e) {
        throw ModelError(std::string("pseudo-model formula: ") + e.what());
    }
}

nlohmann::json to_json(const SatVerdict& v, const Budget& b) {
    nlohmann::json j;
    j["outcome"] = to_string(v.outcome);
    j["engine"] = to_string(v.engine);
    j["budget"] = {{"timeout", b.seconds},
                   {"max_states", b.max_states},
                   {"max_generators", b.max_generators},
                   {"max_nodes", b.max_nodes},
                   {"exhausted", v.exhausted.empty() ? nlohmann::json(nullptr) : nlohmann::json(v.exhausted)}};
    j["normal_form"] = v.normal ? to_string(v.normal) : "";
    j["candidates"] = v.candidates;
    if (!v.detail.empty()) j["detail"] = v.detail;
    if (v.witness) {
        j["witness"] = to_json(*v.witness);
        j["state"] = v.witness->names[static_cast<std::size_t>(v.state)];
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

PseudoModel five_state_example() {
    Model m = Model::make({"a", "b", "c", "x", "y"}, {"1", "2"},
                          {{"1", {{0, 1, 2}, {3}, {4}}}, {"2", {{3, 0}, {2, 4}, {1}}}},
                          {{"x", {3}}, {"y", {4}}});
    PseudoModel p = phi_image(m, conj(atom("x"), atom("y")));
    p.atlas = HueAtlas{};
    WorldSet p0(5), p1(5);
    for (int s : {0, 1, 3}) p0.set(static_cast<std::size_t>(s));
    for (int s : {1, 2, 4}) p1.set(static_cast<std::size_t>(s));
    p.atlas.add("p0", p0);
    p.atlas.add("p1", p1);
    return p;
}

}  // namespace bapal
