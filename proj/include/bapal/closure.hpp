#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bapal/formula.hpp"

namespace bapal {

class BudgetOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// f(0) = |cl|, f(i+1) = 2^(2^f(i)); nullopt once the value leaves 64 bits.
std::optional<std::uint64_t> fresh_count_exact(std::size_t cl_size, int D);
// Symbolic rendering of f(D), e.g. "2^2^6" for D = 1, |cl| = 6.
std::string fresh_count_expr(std::size_t cl_size, int D);

inline constexpr std::uint64_t kDefaultHueCap = 1u << 16;

// cl(phi) is stored as its positive members ("bases", never a negation);
// the full set is bases plus one negation each. Double negations are
// identified with their core for membership.
struct ClosureTable {
    Formula root;
    std::vector<Formula> bases;
    std::vector<std::int8_t> base_kind;  // Op of each base, cached
    std::unordered_map<Formula, int, FormulaHash, FormulaEq> index;

    std::uint64_t fresh_count = 0;  // number of hue atoms materialized by name
    bool fresh_faithful = true;     // false when a hue budget override is in force
    std::string fresh_expr;         // f(D) in symbolic form

    std::vector<AtomId> atoms_col;  // var(root), sorted by name
    std::vector<std::string> atoms_hue;

    int D = 0;
    int d = 0;

    std::size_t cl_size() const { return 2 * bases.size(); }
    // Full cl listing: each base followed by its negation.
    std::vector<Formula> cl() const;

    // Index of the base of f (after stripping negations) and the parity;
    // nullopt when the core is not in cl.
    std::optional<std::pair<int, bool>> locate(const Formula& f) const;
    bool contains(const Formula& f) const { return locate(f).has_value(); }
};

struct ClosureOptions {
    std::optional<std::uint64_t> hue_budget;
    std::uint64_t materialization_cap = kDefaultHueCap;
};

// Requires is_aanf(f). Throws NotAanf, or BudgetOverflow when f(D) exceeds
// the cap and no override is supplied.
ClosureTable closure(const Formula& f, const ClosureOptions& opt = {});

// Only the formula part; never overflows. Used by the decision procedure,
// which materializes hue atoms through its atlas instead.
ClosureTable closure_formulas(const Formula& f);

}  // namespace bapal
