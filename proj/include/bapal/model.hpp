#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bapal/formula.hpp"
#include "bapal/worldset.hpp"

namespace bapal {

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Finite S5 model. Each agent's relation is a partition, stored as a block
// id per world. Atoms missing from `valuation` are false everywhere.
struct Model {
    std::vector<std::string> worlds;
    std::vector<AgentId> agents;             // sorted by name
    std::vector<std::vector<int>> block;     // [agent][world] -> block id, ids dense from 0
    std::map<AtomId, WorldSet> valuation;
    std::optional<int> designated;
    std::map<std::string, std::string> meta;  // free-form annotations (e.g. truncation parameters)

    std::size_t size() const { return worlds.size(); }
    WorldSet all() const { return WorldSet::full(worlds.size()); }
    int world_index(const std::string& name) const;  // throws ModelError
    int agent_index(AgentId a) const;                // -1 when absent
    const WorldSet* denotation(AtomId p) const;      // nullptr when unstored
    bool truth(AtomId p, int w) const;
    std::vector<std::vector<int>> blocks(int agent) const;

    // Builders. Relations are given as lists of blocks over world indices.
    static Model make(std::vector<std::string> worlds, std::vector<std::string> agents,
                      const std::map<std::string, std::vector<std::vector<int>>>& relations,
                      const std::map<std::string, std::vector<int>>& valuation,
                      std::optional<int> designated = std::nullopt);

    // Throws ModelError on any broken invariant.
    void validate() const;
};

// Renumbers block ids so that ids appear in first-occurrence order.
std::vector<int> normalize_blocks(const std::vector<int>& b);

Model restrict(const Model& m, const WorldSet& keep);

struct ValuationClass {
    int representative;
    WorldSet members;
};
std::vector<ValuationClass> valuation_classes(const Model& m);
// Valuation class index of each world (classes numbered by representative order).
std::vector<int> valuation_class_of(const Model& m);

// Conjunction of stored-atom literals true exactly at w's class.
Formula characteristic_formula(const Model& m, int w);

nlohmann::json to_json(const Model& m);
Model model_from_json(const nlohmann::json& j);  // throws ModelError
std::string to_dot(const Model& m);

struct RandomModelSpec {
    int max_worlds = 4;
    int max_atoms = 2;
    std::vector<std::string> agents{"a", "b"};
    bool exact_worlds = false;  // use exactly max_worlds worlds
};
Model random_model(std::uint64_t seed, const RandomModelSpec& spec);
Model random_model(std::uint64_t seed, int max_worlds, int max_atoms, const std::vector<std::string>& agents);

// Names used for random atoms: p, q, r, s, t, u, then v6, v7, ...
std::string default_atom_name(int i);

}  // namespace bapal
