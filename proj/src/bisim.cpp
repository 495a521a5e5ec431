#include "bapal/bisim.hpp"

#include <algorithm>
#include <functional>

namespace bapal {

const char* to_string(BisimKind k) {
    switch (k) {
        case BisimKind::Full: return "full";
        case BisimKind::QRestricted: return "q";
        case BisimKind::NBounded: return "n";
        case BisimKind::XAnnouncement: return "xann";
    }
    return "?";
}

bool BisimWitness::relates(int w, int v) const { return std::binary_search(relation.begin(), relation.end(), std::make_pair(w, v)); }

namespace {

// Union of both agent lists, sorted. An agent a model does not declare
// relates each of its worlds only to itself.
std::vector<AgentId> joint_agents(const Model& m, const Model& n) {
    std::vector<AgentId> out = m.agents;
    for (AgentId a : n.agents)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    std::sort(out.begin(), out.end(), [](AgentId x, AgentId y) { return symbol_name(x) < symbol_name(y); });
    return out;
}

// Block id of node i for agent a over the disjoint union; ids of n are
// shifted past those of m.
struct UnionBlocks {
    std::vector<std::vector<int>> blk;  // [agent][node]
    int blocks = 0;
};

UnionBlocks union_blocks(const Model& m, const Model& n) {
    UnionBlocks u;
    const std::size_t M = m.size(), N = n.size();
    for (AgentId a : joint_agents(m, n)) {
        std::vector<int> b(M + N);
        int off = 0;
        auto fill = [&](const Model& x, std::size_t base) {
            int ai = x.agent_index(a);
            int mx = -1;
            for (std::size_t w = 0; w < x.size(); ++w) {
                int id = ai >= 0 ? x.block[static_cast<std::size_t>(ai)][w] : static_cast<int>(w);
                b[base + w] = off + id;
                mx = std::max(mx, id);
            }
            off += mx + 1;
        };
        fill(m, 0);
        fill(n, M);
        u.blocks = std::max(u.blocks, off);
        u.blk.push_back(std::move(b));
    }
    return u;
}

int renumber(const std::vector<std::vector<int>>& sigs, std::vector<int>& out) {
    std::map<std::vector<int>, int> ids;
    out.assign(sigs.size(), 0);
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        auto [it, fresh] = ids.emplace(sigs[i], static_cast<int>(ids.size()));
        out[i] = it->second;
    }
    return static_cast<int>(ids.size());
}

std::vector<std::vector<int>> atom_sig(const Model& m, const Model& n, const std::vector<AtomId>& atoms) {
    std::vector<std::vector<int>> sig(m.size() + n.size());
    for (std::size_t w = 0; w < m.size(); ++w)
        for (AtomId p : atoms) sig[w].push_back(m.truth(p, static_cast<int>(w)));
    for (std::size_t v = 0; v < n.size(); ++v)
        for (AtomId p : atoms) sig[m.size() + v].push_back(n.truth(p, static_cast<int>(v)));
    return sig;
}

std::vector<std::pair<int, int>> same_colour_pairs(const Model& m, const Model& n, const std::vector<int>& col) {
    std::vector<std::pair<int, int>> rel;
    for (std::size_t w = 0; w < m.size(); ++w)
        for (std::size_t v = 0; v < n.size(); ++v)
            if (col[w] == col[m.size() + v]) rel.emplace_back(static_cast<int>(w), static_cast<int>(v));
    return rel;
}

void check_world(const Model& m, int s) {
    if (s < 0 || static_cast<std::size_t>(s) >= m.size()) throw ModelError("unknown world index " + std::to_string(s));
}

std::optional<BisimWitness> run(BisimKind kind, const std::vector<AtomId>& atoms, int rounds, const Model& m, int s, const Model& n, int t) {
    check_world(m, s);
    check_world(n, t);
    auto col = refine(m, n, atom_sig(m, n, atoms), rounds);
    if (col[static_cast<std::size_t>(s)] != col[m.size() + static_cast<std::size_t>(t)]) return std::nullopt;
    BisimWitness w;
    w.kind = kind;
    w.depth = rounds < 0 ? 0 : rounds;
    w.relation = same_colour_pairs(m, n, col);
    return w;
}

}  // namespace

std::vector<int> refine(const Model& m, const Model& n, const std::vector<std::vector<int>>& sig, int rounds) {
    auto ub = union_blocks(m, n);
    const std::size_t total = m.size() + n.size();
    std::vector<int> col;
    int count = renumber(sig, col);
    for (int r = 0; rounds < 0 || r < rounds; ++r) {
        // colour set visible in each block
        std::vector<std::vector<std::vector<int>>> seen(ub.blk.size(), std::vector<std::vector<int>>(static_cast<std::size_t>(ub.blocks)));
        for (std::size_t a = 0; a < ub.blk.size(); ++a)
            for (std::size_t i = 0; i < total; ++i) seen[a][static_cast<std::size_t>(ub.blk[a][i])].push_back(col[i]);
        for (auto& per : seen)
            for (auto& v : per) {
                std::sort(v.begin(), v.end());
                v.erase(std::unique(v.begin(), v.end()), v.end());
            }
        std::vector<std::vector<int>> next(total);
        for (std::size_t i = 0; i < total; ++i) {
            next[i].push_back(col[i]);
            for (std::size_t a = 0; a < ub.blk.size(); ++a) {
                const auto& v = seen[a][static_cast<std::size_t>(ub.blk[a][i])];
                next[i].push_back(-1);
                next[i].insert(next[i].end(), v.begin(), v.end());
            }
        }
        std::vector<int> ncol;
        int ncount = renumber(next, ncol);
        col = std::move(ncol);
        if (ncount == count) break;
        count = ncount;
    }
    return col;
}

std::set<AtomId> stored_atoms(const Model& m) {
    std::set<AtomId> out;
    for (const auto& [p, d] : m.valuation)
        if (!d.empty()) out.insert(p);
    return out;
}

std::optional<BisimWitness> bisimilar(const Model& m, int s, const Model& n, int t) {
    auto a = stored_atoms(m);
    auto b = stored_atoms(n);
    a.insert(b.begin(), b.end());
    return run(BisimKind::Full, {a.begin(), a.end()}, -1, m, s, n, t);
}

std::optional<BisimWitness> q_bisimilar(const std::set<AtomId>& Q, const Model& m, int s, const Model& n, int t) {
    auto w = run(BisimKind::QRestricted, {Q.begin(), Q.end()}, -1, m, s, n, t);
    if (w) w->atoms = Q;
    return w;
}

std::optional<BisimWitness> n_bisimulation(int depth, const Model& m, int s, const Model& n, int t) {
    if (depth < 0) throw std::invalid_argument("n_bisimilar: negative depth");
    auto a = stored_atoms(m);
    auto b = stored_atoms(n);
    a.insert(b.begin(), b.end());
    return run(BisimKind::NBounded, {a.begin(), a.end()}, depth, m, s, n, t);
}

bool n_bisimilar(int depth, const Model& m, int s, const Model& n, int t) { return n_bisimulation(depth, m, s, n, t).has_value(); }

WorldSet generated(const Model& m, int s) {
    check_world(m, s);
    WorldSet seen(m.size());
    std::vector<int> stack{s};
    seen.set(static_cast<std::size_t>(s));
    while (!stack.empty()) {
        int w = stack.back();
        stack.pop_back();
        for (std::size_t a = 0; a < m.agents.size(); ++a) {
            int b = m.block[a][static_cast<std::size_t>(w)];
            for (std::size_t u = 0; u < m.size(); ++u)
                if (m.block[a][u] == b && !seen.test(u)) {
                    seen.set(u);
                    stack.push_back(static_cast<int>(u));
                }
        }
    }
    return seen;
}

// Works on the submodels generated by s and t: a relation containing (s,t)
// closed under forth and back lives there, and atoms true only outside them
// impose nothing. Candidate maps p -> q on the non-X atoms that are true
// somewhere are pruned by requiring V(p) and V(q) to meet the same
// X-bisimulation classes, which any X!-bisimulation forces. Candidates are
// tried in lexicographic order, so the reported map is the least one.
std::optional<BisimWitness> x_announcement_bisimilar(const std::set<AtomId>& X, const Model& m, int s, const Model& n, int t) {
    check_world(m, s);
    check_world(n, t);
    WorldSet gm = generated(m, s), gn = generated(n, t);
    auto back_m = gm.members(), back_n = gn.members();
    Model rm = restrict(m, gm), rn = restrict(n, gn);
    int rs = static_cast<int>(std::find(back_m.begin(), back_m.end(), static_cast<std::size_t>(s)) - back_m.begin());
    int rt = static_cast<int>(std::find(back_n.begin(), back_n.end(), static_cast<std::size_t>(t)) - back_n.begin());

    auto by_name = [](AtomId x, AtomId y) { return symbol_name(x) < symbol_name(y); };
    std::vector<AtomId> pm, pn;
    for (AtomId p : stored_atoms(rm))
        if (!X.count(p)) pm.push_back(p);
    for (AtomId p : stored_atoms(rn))
        if (!X.count(p)) pn.push_back(p);
    std::sort(pm.begin(), pm.end(), by_name);
    std::sort(pn.begin(), pn.end(), by_name);
    if (pm.size() != pn.size()) return std::nullopt;

    std::vector<AtomId> xs(X.begin(), X.end());
    auto xsig = atom_sig(rm, rn, xs);
    auto xcol = refine(rm, rn, xsig, -1);
    const std::size_t M = rm.size();
    if (xcol[static_cast<std::size_t>(rs)] != xcol[M + static_cast<std::size_t>(rt)]) return std::nullopt;

    auto classes_hit = [&](const Model& x, std::size_t base, AtomId p) {
        std::set<int> out;
        x.denotation(p)->for_each([&](std::size_t w) { out.insert(xcol[base + w]); });
        return out;
    };
    const std::size_t k = pm.size();
    std::vector<std::vector<char>> compat(k, std::vector<char>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) compat[i][j] = classes_hit(rm, 0, pm[i]) == classes_hit(rn, M, pn[j]);

    std::vector<int> pick(k, -1);
    std::vector<char> used(k, 0);
    std::optional<std::vector<int>> colour;
    std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
        if (i == k) {
            auto sig = xsig;
            for (std::size_t w = 0; w < M; ++w)
                for (std::size_t c = 0; c < k; ++c) sig[w].push_back(rm.truth(pm[c], static_cast<int>(w)));
            for (std::size_t v = 0; v < rn.size(); ++v)
                for (std::size_t c = 0; c < k; ++c) sig[M + v].push_back(rn.truth(pn[static_cast<std::size_t>(pick[c])], static_cast<int>(v)));
            auto col = refine(rm, rn, sig, -1);
            if (col[static_cast<std::size_t>(rs)] != col[M + static_cast<std::size_t>(rt)]) return false;
            colour = std::move(col);
            return true;
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (used[j] || !compat[i][j]) continue;
            used[j] = 1;
            pick[i] = static_cast<int>(j);
            if (go(i + 1)) return true;
            used[j] = 0;
        }
        return false;
    };
    if (!go(0)) return std::nullopt;

    BisimWitness w;
    w.kind = BisimKind::XAnnouncement;
    w.atoms = X;
    std::map<AtomId, AtomId> rho;
    for (std::size_t i = 0; i < k; ++i) rho[pm[i]] = pn[static_cast<std::size_t>(pick[i])];
    // close the map into a permutation: atoms of n's side not yet in the
    // domain go to m-side atoms not yet in the range, both empty where it matters
    std::vector<AtomId> dom_extra, ran_extra;
    for (AtomId q : pn)
        if (!rho.count(q)) dom_extra.push_back(q);
    for (AtomId p : pm)
        if (std::none_of(rho.begin(), rho.end(), [&](const auto& e) { return e.second == p; })) ran_extra.push_back(p);
    for (std::size_t i = 0; i < dom_extra.size(); ++i) rho[dom_extra[i]] = ran_extra[i];
    for (auto it = rho.begin(); it != rho.end();) it = it->first == it->second ? rho.erase(it) : std::next(it);
    w.permutation = std::move(rho);
    for (std::size_t a = 0; a < M; ++a)
        for (std::size_t b = 0; b < rn.size(); ++b)
            if ((*colour)[a] == (*colour)[M + b]) w.relation.emplace_back(static_cast<int>(back_m[a]), static_cast<int>(back_n[b]));
    std::sort(w.relation.begin(), w.relation.end());
    return w;
}

bool verify_witness(const BisimWitness& w, const Model& m, const Model& n) {
    if (w.relation.empty()) return false;
    if (w.permutation.has_value() != (w.kind == BisimKind::XAnnouncement)) return false;
    if (w.kind == BisimKind::NBounded) {
        for (auto [u, v] : w.relation)
            if (!n_bisimilar(w.depth, m, u, n, v)) return false;
        return true;
    }
    std::set<AtomId> all = stored_atoms(m);
    for (AtomId p : stored_atoms(n)) all.insert(p);
    std::map<AtomId, AtomId> rho;
    if (w.permutation) {
        rho = *w.permutation;
        std::set<AtomId> range;
        for (const auto& [p, q] : rho) {
            if (w.atoms.count(p) || w.atoms.count(q)) return false;
            if (!range.insert(q).second) return false;
            all.insert(p);
            all.insert(q);
        }
    }
    auto image = [&](AtomId p) {
        auto it = rho.find(p);
        return it == rho.end() ? p : it->second;
    };
    auto atoms_ok = [&](int u, int v) {
        switch (w.kind) {
            case BisimKind::Full:
                for (AtomId p : all)
                    if (m.truth(p, u) != n.truth(p, v)) return false;
                return true;
            case BisimKind::QRestricted:
                for (AtomId p : w.atoms)
                    if (m.truth(p, u) != n.truth(p, v)) return false;
                return true;
            default:
                for (AtomId p : all)
                    if (m.truth(p, u) != n.truth(w.atoms.count(p) ? p : image(p), v)) return false;
                return true;
        }
    };
    auto agents = joint_agents(m, n);
    auto block_of = [](const Model& x, AgentId a, int u) {
        std::vector<int> out;
        int ai = x.agent_index(a);
        if (ai < 0) return std::vector<int>{u};
        for (std::size_t z = 0; z < x.size(); ++z)
            if (x.block[static_cast<std::size_t>(ai)][z] == x.block[static_cast<std::size_t>(ai)][static_cast<std::size_t>(u)]) out.push_back(static_cast<int>(z));
        return out;
    };
    for (auto [u, v] : w.relation) {
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= m.size() || static_cast<std::size_t>(v) >= n.size()) return false;
        if (!atoms_ok(u, v)) return false;
        for (AgentId a : agents) {
            auto bu = block_of(m, a, u), bv = block_of(n, a, v);
            for (int u2 : bu)
                if (std::none_of(bv.begin(), bv.end(), [&](int v2) { return w.relates(u2, v2); })) return false;
            for (int v2 : bv)
                if (std::none_of(bu.begin(), bu.end(), [&](int u2) { return w.relates(u2, v2); })) return false;
        }
    }
    return true;
}

nlohmann::json to_json(const BisimWitness& w, const Model& m, const Model& n) {
    nlohmann::json j;
    j["kind"] = to_string(w.kind);
    if (w.kind == BisimKind::QRestricted || w.kind == BisimKind::XAnnouncement) {
        std::vector<std::string> names;
        for (AtomId p : w.atoms) names.push_back(symbol_name(p));
        std::sort(names.begin(), names.end());
        j["atoms"] = names;
    }
    if (w.kind == BisimKind::NBounded) j["depth"] = w.depth;
    auto pairs = nlohmann::json::array();
    for (auto [u, v] : w.relation) pairs.push_back({m.worlds[static_cast<std::size_t>(u)], n.worlds[static_cast<std::size_t>(v)]});
    j["pairs"] = pairs;
    if (w.permutation) {
        nlohmann::json p = nlohmann::json::object();
        for (const auto& [a, b] : *w.permutation) p[symbol_name(a)] = symbol_name(b);
        j["permutation"] = p;
    } else {
        j["permutation"] = nullptr;
    }
    return j;
}

}  // namespace bapal
