#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bapal/formula.hpp"

namespace bapal {

struct RewriteStep {
    std::string axiom;           // AP, AN, AC, AK, AA, or BX for a bare box
    std::vector<int> position;   // child indices from the root: 0 = left, 1 = right
    Formula before, after;       // the redex and its replacement
};

struct RewriteTrace {
    std::vector<RewriteStep> steps;
};

// Rewrites to AANF, innermost redex first (leftmost among equals).
std::pair<Formula, RewriteTrace> to_aanf(const Formula& f);

// Applies one named rule to a redex; throws std::invalid_argument when the
// rule does not match.
Formula apply_rule(const std::string& axiom, const Formula& redex);

// Re-applies each step at its position, checking the recorded redex.
// Throws std::logic_error on any mismatch.
Formula replay(const Formula& input, const RewriteTrace& trace);

// Termination measure, compared lexicographically: bare boxes first, then
// a weight with w(p) = 1, w(~a) = 1 + w(a), w(a & b) = 1 + w(a) + w(b),
// w(K a) = 1 + w(a), w(box a) = 1 + w(a), w([a]b) = (5 + w(a)) * w(b).
// The weight saturates at the maximum value.
struct NfMeasure {
    std::size_t bare_boxes = 0;
    unsigned __int128 weight = 0;
    bool saturated = false;
    bool operator<(const NfMeasure& o) const {
        if (bare_boxes != o.bare_boxes) return bare_boxes < o.bare_boxes;
        return weight < o.weight;
    }
};
NfMeasure nf_measure(const Formula& f);

std::string to_text(const RewriteTrace& t);
nlohmann::json to_json(const RewriteTrace& t);

}  // namespace bapal
