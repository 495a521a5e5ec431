#include "bapal/closure.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace bapal {

std::optional<std::uint64_t> fresh_count_exact(std::size_t cl_size, int D) {
    std::uint64_t v = cl_size;
    for (int i = 0; i < D; ++i) {
        if (v >= 6) return std::nullopt;  // 2^(2^6) = 2^64 already overflows
        std::uint64_t inner = std::uint64_t{1} << v;
        v = std::uint64_t{1} << inner;
    }
    return v;
}

std::string fresh_count_expr(std::size_t cl_size, int D) {
    std::string e = std::to_string(cl_size);
    for (int i = 0; i < D; ++i) e = (i == 0 ? "2^2^" + e : "2^2^(" + e + ")");
    return e;
}

std::vector<Formula> ClosureTable::cl() const {
    std::vector<Formula> out;
    out.reserve(2 * bases.size());
    for (const auto& b : bases) {
        out.push_back(b);
        out.push_back(neg(b));
    }
    return out;
}

std::optional<std::pair<int, bool>> ClosureTable::locate(const Formula& f) const {
    auto [core, odd] = strip_negations(canonical(f));
    auto it = index.find(core);
    if (it == index.end()) return std::nullopt;
    return std::make_pair(it->second, odd);
}

namespace {

using BaseSet = std::set<Formula, FormulaLess>;

void add_base(BaseSet& out, const Formula& f) { out.insert(strip_negations(canonical(f)).first); }

// Bases of cl(f), f canonical and in AANF.
const BaseSet& bases_of(const Formula& f, std::map<Formula, BaseSet, FormulaLess>& memo) {
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;
    BaseSet out;
    auto subs = subformulas(f);
    for (const auto& s : subs) add_base(out, s);
    for (const auto& s : subs) {
        if (s->op != Op::Know) continue;
        BaseSet inner = bases_of(s->l, memo);
        for (const auto& b : inner) {
            out.insert(know(s->sym, b));
            out.insert(know(s->sym, neg(b)));
        }
    }
    return memo.emplace(f, std::move(out)).first->second;
}

ClosureTable build(const Formula& f) {
    if (!is_aanf(f)) throw NotAanf("closure: formula is not in AANF: " + to_string(f));
    ClosureTable ct;
    ct.root = canonical(f);
    std::map<Formula, BaseSet, FormulaLess> memo;
    const BaseSet& bs = bases_of(ct.root, memo);
    ct.bases.assign(bs.begin(), bs.end());
    for (std::size_t i = 0; i < ct.bases.size(); ++i) {
        ct.index.emplace(ct.bases[i], static_cast<int>(i));
        ct.base_kind.push_back(static_cast<std::int8_t>(ct.bases[i]->op));
    }
    auto vs = var(ct.root);
    std::vector<AtomId> col(vs.begin(), vs.end());
    std::sort(col.begin(), col.end(),
              [](AtomId a, AtomId b) { return symbol_name(a) < symbol_name(b); });
    ct.atoms_col = std::move(col);
    ct.D = quantifier_depth(ct.root);
    ct.d = modal_depth(ct.root);
    ct.fresh_expr = fresh_count_expr(ct.cl_size(), ct.D);
    return ct;
}

std::vector<std::string> hue_names(const ClosureTable& ct, std::uint64_t n) {
    std::set<std::string> taken;
    for (AtomId a : ct.atoms_col) taken.insert(symbol_name(a));
    std::string prefix = "h";
    auto clash = [&](const std::string& p) {
        for (const auto& t : taken)
            if (t.rfind(p, 0) == 0 && t.size() > p.size() &&
                std::all_of(t.begin() + static_cast<long>(p.size()), t.end(), ::isdigit))
                return true;
        return false;
    };
    while (clash(prefix)) prefix += "_";
    std::vector<std::string> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

}  // namespace

ClosureTable closure_formulas(const Formula& f) {
    ClosureTable ct = build(f);
    ct.fresh_count = 0;
    ct.fresh_faithful = false;
    return ct;
}

ClosureTable closure(const Formula& f, const ClosureOptions& opt) {
    ClosureTable ct = build(f);
    if (opt.hue_budget) {
        ct.fresh_count = *opt.hue_budget;
        ct.fresh_faithful = false;
    } else {
        auto exact = fresh_count_exact(ct.cl_size(), ct.D);
        if (!exact || *exact > opt.materialization_cap)
            throw BudgetOverflow("closure: f(D) = " + ct.fresh_expr + " hue atoms exceeds the materialization cap of " +
                                 std::to_string(opt.materialization_cap) + "; pass a hue budget override");
        ct.fresh_count = *exact;
        ct.fresh_faithful = true;
    }
    if (ct.fresh_count > opt.materialization_cap)
        throw BudgetOverflow("closure: hue budget " + std::to_string(ct.fresh_count) + " exceeds the materialization cap");
    ct.atoms_hue = hue_names(ct, ct.fresh_count);
    return ct;
}

}  // namespace bapal
