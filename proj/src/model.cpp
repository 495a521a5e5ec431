#include "bapal/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "bapal/random.hpp"

namespace bapal {

using nlohmann::json;

int Model::world_index(const std::string& name) const {
    for (std::size_t i = 0; i < worlds.size(); ++i)
        if (worlds[i] == name) return static_cast<int>(i);
    throw ModelError("unknown world '" + name + "'");
}

int Model::agent_index(AgentId a) const {
    for (std::size_t i = 0; i < agents.size(); ++i)
        if (agents[i] == a) return static_cast<int>(i);
    return -1;
}

const WorldSet* Model::denotation(AtomId p) const {
    auto it = valuation.find(p);
    return it == valuation.end() ? nullptr : &it->second;
}

bool Model::truth(AtomId p, int w) const {
    const WorldSet* d = denotation(p);
    return d && d->test(static_cast<std::size_t>(w));
}

std::vector<std::vector<int>> Model::blocks(int agent) const {
    const auto& b = block[static_cast<std::size_t>(agent)];
    int nb = 0;
    for (int x : b) nb = std::max(nb, x + 1);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(nb));
    for (std::size_t w = 0; w < b.size(); ++w) out[static_cast<std::size_t>(b[w])].push_back(static_cast<int>(w));
    return out;
}

std::vector<int> normalize_blocks(const std::vector<int>& b) {
    std::map<int, int> ren;
    std::vector<int> out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        auto it = ren.find(b[i]);
        if (it == ren.end()) it = ren.emplace(b[i], static_cast<int>(ren.size())).first;
        out[i] = it->second;
    }
    return out;
}

Model Model::make(std::vector<std::string> ws, std::vector<std::string> ags,
                  const std::map<std::string, std::vector<std::vector<int>>>& relations,
                  const std::map<std::string, std::vector<int>>& val, std::optional<int> designated) {
    Model m;
    m.worlds = std::move(ws);
    std::sort(ags.begin(), ags.end());
    ags.erase(std::unique(ags.begin(), ags.end()), ags.end());
    const std::size_t n = m.worlds.size();
    for (const auto& a : ags) {
        m.agents.push_back(intern(a));
        std::vector<int> b(n, -1);
        auto it = relations.find(a);
        if (it != relations.end()) {
            int id = 0;
            for (const auto& blk : it->second) {
                for (int w : blk) {
                    if (w < 0 || static_cast<std::size_t>(w) >= n) throw ModelError("relation block names a world out of range");
                    if (b[static_cast<std::size_t>(w)] >= 0) throw ModelError("relation blocks for agent " + a + " overlap");
                    b[static_cast<std::size_t>(w)] = id;
                }
                ++id;
            }
            for (int x : b)
                if (x < 0) throw ModelError("relation blocks for agent " + a + " do not cover every world");
        } else {
            for (std::size_t w = 0; w < n; ++w) b[w] = static_cast<int>(w);  // unspecified: identity
        }
        m.block.push_back(normalize_blocks(b));
    }
    for (const auto& [p, ws2] : val) {
        WorldSet s(n);
        for (int w : ws2) {
            if (w < 0 || static_cast<std::size_t>(w) >= n) throw ModelError("valuation names a world out of range");
            s.set(static_cast<std::size_t>(w));
        }
        m.valuation[intern(p)] = s;
    }
    m.designated = designated;
    m.validate();
    return m;
}

void Model::validate() const {
    if (worlds.empty()) throw ModelError("model has no worlds");
    std::set<std::string> names(worlds.begin(), worlds.end());
    if (names.size() != worlds.size()) throw ModelError("duplicate world names");
    if (block.size() != agents.size()) throw ModelError("one partition per agent required");
    for (const auto& b : block) {
        if (b.size() != worlds.size()) throw ModelError("partition does not cover the worlds");
        for (int x : b)
            if (x < 0) throw ModelError("partition has an unassigned world");
    }
    for (const auto& [p, s] : valuation)
        if (s.universe() != worlds.size()) throw ModelError("valuation of " + symbol_name(p) + " has the wrong universe");
    if (designated && (*designated < 0 || static_cast<std::size_t>(*designated) >= worlds.size()))
        throw ModelError("designated world out of range");
}

Model restrict(const Model& m, const WorldSet& keep) {
    if (keep.empty()) throw ModelError("restriction to the empty set of worlds");
    auto idx = keep.members();
    std::vector<int> newid(m.size(), -1);
    Model r;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        newid[idx[i]] = static_cast<int>(i);
        r.worlds.push_back(m.worlds[idx[i]]);
    }
    r.agents = m.agents;
    for (const auto& b : m.block) {
        std::vector<int> nb;
        nb.reserve(idx.size());
        for (auto w : idx) nb.push_back(b[w]);
        r.block.push_back(normalize_blocks(nb));
    }
    for (const auto& [p, s] : m.valuation) {
        WorldSet t(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            if (s.test(idx[i])) t.set(i);
        r.valuation[p] = t;
    }
    if (m.designated && newid[static_cast<std::size_t>(*m.designated)] >= 0)
        r.designated = newid[static_cast<std::size_t>(*m.designated)];
    r.meta = m.meta;
    return r;
}

std::vector<int> valuation_class_of(const Model& m) {
    const std::size_t n = m.size();
    std::map<std::vector<bool>, int> seen;
    std::vector<int> out(n);
    for (std::size_t w = 0; w < n; ++w) {
        std::vector<bool> sig;
        sig.reserve(m.valuation.size());
        for (const auto& [p, s] : m.valuation) sig.push_back(s.test(w));
        auto it = seen.find(sig);
        if (it == seen.end()) it = seen.emplace(sig, static_cast<int>(seen.size())).first;
        out[w] = it->second;
    }
    return out;
}

std::vector<ValuationClass> valuation_classes(const Model& m) {
    auto cls = valuation_class_of(m);
    std::vector<ValuationClass> out;
    for (std::size_t w = 0; w < m.size(); ++w) {
        auto c = static_cast<std::size_t>(cls[w]);
        if (c == out.size()) out.push_back({static_cast<int>(w), WorldSet(m.size())});
        out[c].members.set(w);
    }
    return out;
}

Formula characteristic_formula(const Model& m, int w) {
    std::vector<std::pair<std::string, AtomId>> named;
    for (const auto& [p, s] : m.valuation) named.emplace_back(symbol_name(p), p);
    std::sort(named.begin(), named.end());
    std::vector<Formula> lits;
    for (const auto& [name, p] : named) lits.push_back(m.truth(p, w) ? atom(p) : neg(atom(p)));
    return conj_all(lits);
}

json to_json(const Model& m) {
    json j;
    json ags = json::array();
    for (AgentId a : m.agents) ags.push_back(symbol_name(a));
    j["agents"] = ags;
    j["worlds"] = m.worlds;
    json rel = json::object();
    for (std::size_t a = 0; a < m.agents.size(); ++a) {
        json blocks = json::array();
        for (const auto& blk : m.blocks(static_cast<int>(a))) {
            json names = json::array();
            for (int w : blk) names.push_back(m.worlds[static_cast<std::size_t>(w)]);
            blocks.push_back(names);
        }
        rel[symbol_name(m.agents[a])] = blocks;
    }
    j["relations"] = rel;
    json val = json::object();
    for (const auto& [p, s] : m.valuation) {
        json names = json::array();
        s.for_each([&](std::size_t w) { names.push_back(m.worlds[w]); });
        val[symbol_name(p)] = names;
    }
    j["valuation"] = val;
    if (m.designated) j["designated"] = m.worlds[static_cast<std::size_t>(*m.designated)];
    if (!m.meta.empty()) j["meta"] = m.meta;
    return j;
}

Model model_from_json(const json& j) {
    try {
        if (!j.is_object()) throw ModelError("model JSON must be an object");
        std::vector<std::string> worlds = j.at("worlds").get<std::vector<std::string>>();
        std::map<std::string, int> idx;
        for (std::size_t i = 0; i < worlds.size(); ++i) {
            if (!idx.emplace(worlds[i], static_cast<int>(i)).second) throw ModelError("duplicate world '" + worlds[i] + "'");
        }
        auto lookup = [&](const std::string& w) {
            auto it = idx.find(w);
            if (it == idx.end()) throw ModelError("unknown world '" + w + "'");
            return it->second;
        };
        std::vector<std::string> agents;
        if (j.contains("agents")) agents = j.at("agents").get<std::vector<std::string>>();
        std::map<std::string, std::vector<std::vector<int>>> rel;
        if (j.contains("relations")) {
            for (const auto& [a, blocks] : j.at("relations").items()) {
                if (std::find(agents.begin(), agents.end(), a) == agents.end()) agents.push_back(a);
                std::vector<std::vector<int>> bs;
                for (const auto& blk : blocks) {
                    std::vector<int> b;
                    for (const auto& w : blk) b.push_back(lookup(w.get<std::string>()));
                    bs.push_back(std::move(b));
                }
                rel[a] = std::move(bs);
            }
        }
        for (const auto& a : agents)
            if (!rel.count(a)) throw ModelError("agent '" + a + "' has no relation");
        std::map<std::string, std::vector<int>> val;
        if (j.contains("valuation")) {
            for (const auto& [p, ws] : j.at("valuation").items()) {
                std::vector<int> v;
                for (const auto& w : ws) v.push_back(lookup(w.get<std::string>()));
                val[p] = std::move(v);
            }
        }
        std::optional<int> des;
        if (j.contains("designated") && !j.at("designated").is_null()) des = lookup(j.at("designated").get<std::string>());
        Model m = Model::make(worlds, agents, rel, val, des);
        if (j.contains("meta")) m.meta = j.at("meta").get<std::map<std::string, std::string>>();
        return m;
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed model JSON: ") + e.what());
    }
}

std::string to_dot(const Model& m) {
    static const char* styles[] = {"solid", "dashed", "dotted", "bold"};
    std::ostringstream os;
    os << "graph M {\n  node [shape=box];\n";
    for (std::size_t w = 0; w < m.size(); ++w) {
        std::string label = m.worlds[w] + ":";
        for (const auto& [p, s] : m.valuation) label += " " + (s.test(w) ? symbol_name(p) : "~" + symbol_name(p));
        os << "  w" << w << " [label=\"" << label << "\"";
        if (m.designated && static_cast<std::size_t>(*m.designated) == w) os << ", peripheries=2";
        os << "];\n";
    }
    for (std::size_t a = 0; a < m.agents.size(); ++a) {
        const auto& b = m.block[a];
        for (std::size_t u = 0; u < m.size(); ++u)
            for (std::size_t v = u + 1; v < m.size(); ++v)
                if (b[u] == b[v])
                    os << "  w" << u << " -- w" << v << " [label=\"" << symbol_name(m.agents[a]) << "\", style=" << styles[a % 4]
                       << "];\n";
    }
    os << "}\n";
    return os.str();
}

std::string default_atom_name(int i) {
    static const char* names[] = {"p", "q", "r", "s", "t", "u"};
    if (i < 6) return names[i];
    return "v" + std::to_string(i);
}

Model random_model(std::uint64_t seed, const RandomModelSpec& spec) {
    if (spec.max_worlds < 1 || spec.max_atoms < 1) throw ModelError("random_model: bounds must be >= 1");
    Rng rng(seed);
    int n = spec.exact_worlds ? spec.max_worlds : 1 + rng.below(spec.max_worlds);
    int k = 1 + rng.below(spec.max_atoms);
    std::vector<std::string> ws;
    for (int i = 0; i < n; ++i) ws.push_back("w" + std::to_string(i));
    std::map<std::string, std::vector<std::vector<int>>> rel;
    auto agents = spec.agents;
    std::sort(agents.begin(), agents.end());
    for (const auto& a : agents) {
        auto part = random_set_partition(rng, n);
        int nb = *std::max_element(part.begin(), part.end()) + 1;
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(nb));
        for (int w = 0; w < n; ++w) blocks[static_cast<std::size_t>(part[static_cast<std::size_t>(w)])].push_back(w);
        rel[a] = blocks;
    }
    std::map<std::string, std::vector<int>> val;
    for (int i = 0; i < k; ++i) {
        std::vector<int> ext;
        for (int w = 0; w < n; ++w)
            if (rng.coin()) ext.push_back(w);
        val[default_atom_name(i)] = ext;
    }
    return Model::make(ws, agents, rel, val, 0);
}

Model random_model(std::uint64_t seed, int max_worlds, int max_atoms, const std::vector<std::string>& agents) {
    RandomModelSpec s;
    s.max_worlds = max_worlds;
    s.max_atoms = max_atoms;
    s.agents = agents;
    return random_model(seed, s);
}

}  // namespace bapal
