#include "bapal/fmp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "bapal/check.hpp"

namespace bapal {

Formula fmp_type_a() { return conj(atom("x"), khat("a", conj(neg(atom("x")), atom("y")))); }
Formula fmp_type_b() { return conj(atom("x"), khat("a", conj(neg(atom("x")), neg(atom("y"))))); }

std::vector<Formula> fmp_conjuncts() {
    Formula x = atom("x"), y = atom("y"), nx = neg(x), ny = neg(y);
    Formula c1 = know("b", conj(conj(x, khat("a", nx)), disj(know("a", implies(nx, y)), know("a", implies(nx, ny)))));
    Formula c2 = khat("b", fmp_type_a());
    Formula c3 = khat("b", fmp_type_b());
    Formula c4 = know("b", implies(fmp_type_a(), dia(know("b", fmp_type_a()))));
    Formula c5 = know("b", box(implies(know("b", khat("a", nx)), khat("b", fmp_type_a()))));
    return {c1, c2, c3, c4, c5};
}

Formula fmp_formula() { return conj_all(fmp_conjuncts()); }

Model fig1_literal() {
    return Model::make({"A", "B", "TL", "TR"}, {"a", "b"},
                       {{"a", {{0, 2}, {1, 3}}}, {"b", {{0, 1}, {2}, {3}}}},
                       {{"x", {0, 1}}, {"y", {2}}}, 0);
}

Model fig1_model() {
    return Model::make({"A", "B", "TL", "TR"}, {"a", "b"},
                       {{"a", {{0, 2}, {1, 3}}}, {"b", {{0, 1}, {2}, {3}}}},
                       {{"x", {0, 1}}, {"y", {2}}, {"p_0", {0}}}, 0);
}

Model fig2_truncation(int copies) {
    if (copies < 1) throw std::invalid_argument("fig2_truncation: copies must be positive");
    std::vector<std::string> worlds;
    std::map<std::string, std::vector<std::vector<int>>> rel;
    std::map<std::string, std::vector<int>> val;
    std::vector<int> chain;
    for (int i = 0; i < copies; ++i) {
        int base = 4 * i;
        std::string s = std::to_string(i);
        worlds.insert(worlds.end(), {"A" + s, "B" + s, "TL" + s, "TR" + s});
        rel["a"].push_back({base, base + 2});
        rel["a"].push_back({base + 1, base + 3});
        rel["b"].push_back({base + 2});
        rel["b"].push_back({base + 3});
        chain.push_back(base);
        chain.push_back(base + 1);
        val["x"].push_back(base);
        val["x"].push_back(base + 1);
        val["y"].push_back(base + 2);
        val["p_" + s] = {base};
    }
    rel["b"].push_back(chain);
    return Model::make(worlds, {"a", "b"}, rel, val, 0);
}

namespace {

bool each_rgs(std::size_t n, const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> a(n, 0);
    std::function<bool(std::size_t, int)> go = [&](std::size_t i, int mx) -> bool {
        if (i == n) return fn(a);
        for (int v = 0; v <= mx + 1; ++v) {
            a[i] = v;
            if (!go(i + 1, std::max(mx, v))) return false;
        }
        return true;
    };
    if (n == 0) return fn(a);
    return go(1, 0);
}

std::vector<int> relabel(const std::vector<int>& blocks, const std::vector<int>& perm) {
    std::vector<int> out(perm.size());
    std::map<int, int> ids;
    for (std::size_t i = 0; i < perm.size(); ++i)
        out[i] = ids.emplace(blocks[static_cast<std::size_t>(perm[i])], static_cast<int>(ids.size())).first->second;
    return out;
}

}  // namespace

FmpReport finite_search(int max_worlds, const Deadline* deadline) {
    if (max_worlds < 1) throw std::invalid_argument("finite_search: max_worlds must be positive");
    FmpReport rep;
    rep.max_worlds = max_worlds;
    const Formula f = fmp_formula();
    for (int n = 1; n <= max_worlds; ++n) {
        const auto N = static_cast<std::size_t>(n);
        std::vector<std::vector<int>> perms;
        std::vector<int> p(N);
        std::iota(p.begin(), p.end(), 0);
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
        std::vector<std::vector<int>> parts;
        each_rgs(N, [&](const std::vector<int>& r) {
            parts.push_back(r);
            return true;
        });
        std::set<std::vector<int>> seen;
        for (const auto& pa : parts)
            for (const auto& pb : parts)
                for (unsigned xm = 0; xm < (1u << n); ++xm)
                    for (unsigned ym = 0; ym < (1u << n); ++ym)
                        for (const auto& pc : parts) {
                            // valuation classes must keep x and y constant
                            bool fits = true;
                            for (std::size_t i = 0; i < N && fits; ++i)
                                for (std::size_t j = i + 1; j < N && fits; ++j)
                                    if (pc[i] == pc[j] && (((xm >> i) ^ (xm >> j)) & 1u || ((ym >> i) ^ (ym >> j)) & 1u)) fits = false;
                            if (!fits) continue;
                            ++rep.enumerated;
                            if (deadline) deadline->poll();
                            std::vector<int> best;
                            for (const auto& pm : perms) {
                                std::vector<int> code = relabel(pa, pm);
                                auto b = relabel(pb, pm), c = relabel(pc, pm);
                                code.insert(code.end(), b.begin(), b.end());
                                for (std::size_t i = 0; i < N; ++i) code.push_back(static_cast<int>((xm >> pm[i]) & 1u));
                                for (std::size_t i = 0; i < N; ++i) code.push_back(static_cast<int>((ym >> pm[i]) & 1u));
                                code.insert(code.end(), c.begin(), c.end());
                                if (best.empty() || code < best) best = std::move(code);
                            }
                            if (!seen.insert(best).second) continue;
                            ++rep.examined;
                            std::vector<std::string> worlds;
                            for (int i = 0; i < n; ++i) worlds.push_back("w" + std::to_string(i));
                            std::map<std::string, std::vector<std::vector<int>>> rel;
                            for (const auto& [name, part] : {std::pair{std::string("a"), &pa}, std::pair{std::string("b"), &pb}}) {
                                std::map<int, std::vector<int>> blocks;
                                for (std::size_t i = 0; i < N; ++i) blocks[(*part)[i]].push_back(static_cast<int>(i));
                                for (auto& [k, v] : blocks) rel[name].push_back(v);
                            }
                            std::map<std::string, std::vector<int>> val;
                            for (std::size_t i = 0; i < N; ++i) {
                                if ((xm >> i) & 1u) val["x"].push_back(static_cast<int>(i));
                                if ((ym >> i) & 1u) val["y"].push_back(static_cast<int>(i));
                                val["z" + std::to_string(pc[i] + 1)].push_back(static_cast<int>(i));
                            }
                            Model m = Model::make(worlds, {"a", "b"}, rel, val);
                            Checker chk(m, deadline);
                            WorldSet e = chk.extension(f);
                            if (!e.empty()) {
                                rep.world = static_cast<int>(e.members().front());
                                m.designated = rep.world;
                                rep.counterexample = std::move(m);
                                return rep;
                            }
                        }
    }
    return rep;
}

nlohmann::json to_json(const FmpReport& r) {
    nlohmann::json j;
    j["max_worlds"] = r.max_worlds;
    j["enumerated"] = r.enumerated;
    j["examined"] = r.examined;
    if (r.counterexample) {
        j["outcome"] = "counterexample";
        j["model"] = to_json(*r.counterexample);
        j["world"] = r.counterexample->worlds[static_cast<std::size_t>(r.world)];
    } else {
        j["outcome"] = "none_found";
    }
    return j;
}

}  // namespace bapal
