#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bapal/model.hpp"

namespace bapal {

enum class BisimKind { Full, QRestricted, NBounded, XAnnouncement };

const char* to_string(BisimKind k);

struct BisimWitness {
    BisimKind kind = BisimKind::Full;
    std::set<AtomId> atoms;  // Q or X
    int depth = 0;           // n for NBounded
    std::vector<std::pair<int, int>> relation;  // (world of m, world of n), sorted
    std::optional<std::map<AtomId, AtomId>> permutation;  // XAnnouncement only

    bool relates(int w, int v) const;
};

// Partition refinement over the disjoint union of m and n. Worlds of m are
// numbered 0..|m|-1, worlds of n follow. `sig` gives the initial colour of
// each node; `rounds` < 0 means run to the fixpoint. Returns a colour per node.
std::vector<int> refine(const Model& m, const Model& n, const std::vector<std::vector<int>>& sig, int rounds);

std::optional<BisimWitness> bisimilar(const Model& m, int s, const Model& n, int t);
std::optional<BisimWitness> q_bisimilar(const std::set<AtomId>& Q, const Model& m, int s, const Model& n, int t);
bool n_bisimilar(int depth, const Model& m, int s, const Model& n, int t);
std::optional<BisimWitness> n_bisimulation(int depth, const Model& m, int s, const Model& n, int t);
std::optional<BisimWitness> x_announcement_bisimilar(const std::set<AtomId>& X, const Model& m, int s, const Model& n, int t);

// Checks the defining clauses of the witness's kind on the model pair.
bool verify_witness(const BisimWitness& w, const Model& m, const Model& n);

// Worlds reachable from s through any agent's relation.
WorldSet generated(const Model& m, int s);

std::set<AtomId> stored_atoms(const Model& m);

nlohmann::json to_json(const BisimWitness& w, const Model& m, const Model& n);

}  // namespace bapal
