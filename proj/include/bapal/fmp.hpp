#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "bapal/budget.hpp"
#include "bapal/formula.hpp"
#include "bapal/model.hpp"

namespace bapal {

// The five conjuncts over agents a, b and atoms x, y, in order.
std::vector<Formula> fmp_conjuncts();
Formula fmp_formula();
// x & Khat_a(~x & y): a world of type A.
Formula fmp_type_a();
// x & Khat_a(~x & ~y): a world of type B.
Formula fmp_type_b();

// Worlds A, B, TL, TR. A ~b B, A ~a TL, B ~a TR; x at A and B, y at TL.
// The atom p_0 is true only at A, as p_i marks A_i in the infinite model;
// without it A and B share a valuation and no Boolean tells them apart.
Model fig1_model();
// The figure exactly as drawn, without p_0.
Model fig1_literal();

// Worlds A_i, B_i, TL_i, TR_i for i < copies; b links the chain
// A_0 B_0 A_1 B_1 ..., a links A_i with TL_i and B_i with TR_i; p_i is true
// only at A_i.
Model fig2_truncation(int copies);

struct FmpReport {
    int max_worlds = 0;
    std::uint64_t enumerated = 0;  // structures generated before isomorphism reduction
    std::uint64_t examined = 0;    // distinct structures checked
    std::optional<Model> counterexample;
    int world = -1;
};

// Every model with 1..max_worlds worlds, two S5 agents, atoms x, y and
// block markers z1..zk that split worlds of equal (x, y) value, up to
// isomorphism; fmp is checked at every world.
FmpReport finite_search(int max_worlds, const Deadline* deadline = nullptr);

nlohmann::json to_json(const FmpReport& r);

}  // namespace bapal
