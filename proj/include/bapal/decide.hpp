#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bapal/budget.hpp"
#include "bapal/closure.hpp"
#include "bapal/formula.hpp"
#include "bapal/model.hpp"
#include "bapal/worldset.hpp"

namespace bapal {

// Membership bit per base of a closure table; the negation of a base is in
// the set exactly when the bit is clear.
using Colour = std::vector<char>;

bool colour_has(const ClosureTable& ct, const Colour& c, const Formula& f);  // throws std::invalid_argument outside cl
// Checks the three maximal-set clauses; on failure `why` names the culprit.
bool is_maximal(const ClosureTable& ct, const Colour& c, std::string* why = nullptr);

// Every colour satisfying the maximal-set clauses, in a fixed order
// (counter over the atom, knowledge and announcement bases; conjunctions
// are determined). The callback returns false to stop early.
void for_each_colour(const ClosureTable& ct, const std::function<bool(const Colour&)>& fn);
// Throws ResourceExhausted("states") once more than `cap` colours exist.
std::vector<Colour> maximal_colours(const ClosureTable& ct, std::size_t cap = std::size_t{1} << 16);

std::vector<Formula> colour_formulas(const ClosureTable& ct, const Colour& c);

// Hue atoms of a pseudo-model. Named atoms carry explicit denotations. When
// generators are present they partition the states and every union of
// generators (the empty one included) is also a hue atom; generator i is
// exposed as the atom gen_names[i].
struct HueAtlas {
    std::vector<std::string> names;
    std::vector<WorldSet> denot;
    std::vector<std::string> gen_names;
    std::vector<WorldSet> generators;
    std::unordered_map<WorldSet, int> reverse;  // named denotation -> first atom carrying it

    int add(const std::string& name, const WorldSet& d);
    bool boolean() const { return !generators.empty(); }
    // d is the denotation of some hue atom
    bool realizes(const WorldSet& d) const;
    // Denotations of all hue atoms containing state s, deduplicated; the
    // generator unions are enumerated, so their number is capped.
    std::vector<WorldSet> containing(std::size_t s, std::size_t max_generators = 22) const;
};

struct PseudoModel {
    std::shared_ptr<const ClosureTable> ct;
    std::vector<std::string> names;
    std::vector<Colour> colour;
    std::vector<AgentId> agents;           // sorted by name
    std::vector<std::vector<int>> block;   // [agent][state]
    HueAtlas atlas;

    std::size_t size() const { return colour.size(); }
    WorldSet all() const { return WorldSet::full(size()); }
    bool has(int s, const Formula& f) const { return colour_has(*ct, colour[static_cast<std::size_t>(s)], f); }
    bool has_base(int s, int b) const { return colour[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] != 0; }
    WorldSet members(const Formula& f) const;  // states whose colour holds f
    std::vector<std::string> hue_of(int s) const;  // named atoms and generator atoms true at s
    int state_index(const std::string& name) const;
};

// The structure read as a Kripke model: colour atoms from membership,
// named hue atoms and generator atoms from the atlas. No other atoms.
Model to_kripke(const PseudoModel& p);

// States kept by `keep`, relations and atlas restricted; empty generators
// are dropped. Throws ModelError on an empty result.
PseudoModel restrict(const PseudoModel& p, const WorldSet& keep);

// States containing alpha and lying in the denotation `hue`.
PseudoModel syntactic_restriction(const PseudoModel& p, const Formula& alpha, const WorldSet& hue);
PseudoModel syntactic_restriction(const PseudoModel& p, const Formula& alpha, const std::string& hue_atom);

struct ClauseReport {
    int clause = 0;
    bool ok = true;
    std::optional<int> state;  // counterexample state, when one exists
    std::string detail;
};
// Independent pass/fail for each of the six pseudo-model clauses.
std::vector<ClauseReport> validate(const PseudoModel& p);
bool valid(const PseudoModel& p);

enum class Tri { False, True, Unknown };
const char* to_string(Tri t);

struct ConsistencyOptions {
    const Deadline* deadline = nullptr;
    std::size_t max_nodes = 1000000;   // witness evaluations
    std::size_t max_generators = 22;   // classes enumerated per restriction
};

// n-consistency. Unknown means a required witness could not be excluded:
// this happens only when the formula under the box has a box of its own.
// Cap overruns throw ResourceExhausted.
Tri consistent(const PseudoModel& p, int n, const ConsistencyOptions& opt = {});

struct Witness {
    PseudoModel model;
    int state = 0;
};
// Candidate witness: the image of the restriction read as a Kripke model.
// Returned only when psi holds at the state, the candidate is (n-1)-consistent
// and the bisimulation module relates it to the restriction.
std::optional<Witness> find_witness(const PseudoModel& p, int sigma, const Formula& alpha, const WorldSet& hue,
                                    const Formula& psi, int n, const ConsistencyOptions& opt = {});

// One state per world, colour = closure formulas true there, relations as in
// m, generators = valuation classes of m over all its atoms.
PseudoModel phi_image(const Model& m, const Formula& f);
PseudoModel phi_image(const Model& m, const std::shared_ptr<const ClosureTable>& ct);

struct ActualiseOptions {
    int copies = 3;
    int act_limit = 12;          // act atoms q{j}_{i} for i = 1..act_limit
    std::size_t max_hue = 64;    // hue atoms enumerated from generator unions
};
// Truncated actualisation; worlds are named "(state,n)". Hue atoms are
// enumerated as the named atoms, then nonempty generator unions by mask.
Model actualise(const PseudoModel& p, const ActualiseOptions& opt);
Model actualise(const PseudoModel& p, int copies);
int deg(int prime, int n);
std::vector<int> first_primes(std::size_t k);

enum class Engine { Pruned, Faithful };
const char* to_string(Engine e);

struct Budget {
    double seconds = 60;
    std::size_t max_states = std::size_t{1} << 16;  // colours enumerated
    std::size_t max_generators = 22;
    std::size_t max_nodes = 1000000;                // witness evaluations / candidate structures
};

enum class Outcome { Sat, Unsat, ResourceExhausted };
const char* to_string(Outcome o);

struct SatVerdict {
    Outcome outcome = Outcome::ResourceExhausted;
    Engine engine = Engine::Pruned;
    Formula normal;                  // the AANF form decided
    std::string exhausted;           // binding dimension when resource_exhausted
    std::string detail;
    std::optional<PseudoModel> witness;
    int state = -1;
    std::size_t candidates = 0;      // colours (pruned) or structures (faithful) examined
};

SatVerdict satisfiable(const Formula& f, Engine engine = Engine::Pruned, const Budget& budget = {});

nlohmann::json to_json(const PseudoModel& p);
// Reads the format written by to_json(PseudoModel). Throws ModelError.
PseudoModel pseudo_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SatVerdict& v, const Budget& b);

// The pseudo-model of the actualisation example: states a, b, c, x, y with
// x ~2 a ~1 b ~1 c ~2 y, V(x) = {x}, V(y) = {y}, hue atoms p0 = {a,b,x} and
// p1 = {b,c,y}.
PseudoModel five_state_example();

}  // namespace bapal
