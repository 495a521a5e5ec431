#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bapal {

// ── identifiers ─────────────────────────────────────────────────────────

// Session-wide interning of atom and agent names. Handles are dense and
// never reused; the table is guarded by a mutex.
using Symbol = std::uint32_t;
Symbol intern(std::string_view name);
const std::string& symbol_name(Symbol s);

using AtomId = Symbol;
using AgentId = Symbol;

// Reserved atom used to spell the tautology as p0 | ~p0.
inline constexpr const char* kTopAtom = "p0";

// ── AST ─────────────────────────────────────────────────────────────────

enum class Op : std::uint8_t { Atom, Not, And, Know, Ann, Box };

struct Node;
using Formula = std::shared_ptr<const Node>;

struct Node {
    Op op;
    Symbol sym = 0;   // atom for Atom, agent for Know
    Formula l, r;     // Not/Know/Box: l.  And: l,r.  Ann: l announced, r body.
    std::size_t hash = 0;
    std::size_t size = 1;  // symbol count
};

Formula atom(std::string_view name);
Formula atom(AtomId a);
Formula neg(Formula f);
Formula conj(Formula a, Formula b);
Formula know(std::string_view agent, Formula f);
Formula know(AgentId a, Formula f);
Formula ann(Formula announced, Formula body);
Formula box(Formula f);

// sugar, expanded on construction
Formula disj(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula khat(std::string_view agent, Formula f);
Formula khat(AgentId a, Formula f);
Formula dia_ann(Formula announced, Formula body);
Formula dia(Formula f);
Formula top();
Formula bottom();
Formula conj_all(const std::vector<Formula>& fs);  // empty -> top()
Formula disj_all(const std::vector<Formula>& fs);  // empty -> bottom()

bool equal(const Formula& a, const Formula& b);

struct FormulaHash {
    std::size_t operator()(const Formula& f) const noexcept { return f->hash; }
};
struct FormulaEq {
    bool operator()(const Formula& a, const Formula& b) const { return equal(a, b); }
};
// Total order: size, then structure. Used for deterministic enumeration.
struct FormulaLess {
    bool operator()(const Formula& a, const Formula& b) const;
};

// Removes a stack of negations; returns (core, odd parity).
std::pair<Formula, bool> strip_negations(const Formula& f);
// Removes every ~~ pair at every position.
Formula canonical(const Formula& f);

// ── text ────────────────────────────────────────────────────────────────

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t pos, const std::string& msg);
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

Formula parse(std::string_view text);
std::string to_string(const Formula& f);
// Unicode rendering for human output; not parseable.
std::string to_pretty(const Formula& f);

// ── metrics ─────────────────────────────────────────────────────────────

struct Metrics {
    std::set<std::string> vars;
    int d = 0;  // modal depth
    int D = 0;  // quantifier depth
};

Metrics metrics(const Formula& f);
std::set<AtomId> var(const Formula& f);
int modal_depth(const Formula& f);
int quantifier_depth(const Formula& f);

bool is_boolean(const Formula& f);    // no Know, Ann, Box
bool is_epistemic(const Formula& f);  // no Ann, Box
bool is_aanf(const Formula& f);

class NotAanf : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Subformulas in the AANF sense: [a] box p contributes a and p, never box p.
// Ordered by FormulaLess, duplicates removed.
std::vector<Formula> subformulas(const Formula& f);

std::set<AgentId> agents_of(const Formula& f);

}  // namespace bapal
