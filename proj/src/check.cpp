#include "bapal/check.hpp"

#include <map>
#include <set>

namespace bapal {

Checker::Checker(const Model& m, const Deadline* deadline, std::size_t max_classes)
    : m_(m), deadline_(deadline), max_classes_(max_classes) {
    cls_ = valuation_class_of(m_);
    for (std::size_t w = 0; w < cls_.size(); ++w) {
        auto c = static_cast<std::size_t>(cls_[w]);
        if (c >= class_members_.size()) class_members_.resize(c + 1, WorldSet(m_.size()));
        class_members_[c].set(w);
    }
}

WorldSet Checker::extension(const WorldSet& W, const Formula& f) { return eval(W, f); }

bool Checker::holds(int w, const Formula& f) { return eval(m_.all(), f).test(static_cast<std::size_t>(w)); }

bool Checker::holds_in(const WorldSet& W, int w, const Formula& f) {
    if (!W.test(static_cast<std::size_t>(w))) throw ModelError("evaluation world outside the restriction");
    return eval(W, f).test(static_cast<std::size_t>(w));
}

WorldSet Checker::eval(const WorldSet& W, const Formula& f) {
    if (deadline_) deadline_->poll();
    switch (f->op) {
        case Op::Atom: {
            const WorldSet* d = m_.denotation(f->sym);
            return d ? (W & *d) : WorldSet(m_.size());
        }
        case Op::Not:
            return W - eval(W, f->l);
        case Op::And: {
            WorldSet a = eval(W, f->l);
            if (a.empty()) return a;
            return a & eval(W, f->r);
        }
        case Op::Know: {
            int ag = m_.agent_index(f->sym);
            if (ag < 0) throw ModelError("agent '" + symbol_name(f->sym) + "' is not declared in the model");
            const auto& blk = m_.block[static_cast<std::size_t>(ag)];
            WorldSet bad = W - eval(W, f->l);
            if (bad.empty()) return W;
            std::vector<char> tainted(m_.size(), 0);
            bad.for_each([&](std::size_t w) { tainted[static_cast<std::size_t>(blk[w])] = 1; });
            WorldSet out(m_.size());
            W.for_each([&](std::size_t w) {
                if (!tainted[static_cast<std::size_t>(blk[w])]) out.set(w);
            });
            return out;
        }
        case Op::Ann:
        case Op::Box: {
            Key key{W, f};
            auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
            WorldSet out(m_.size());
            if (f->op == Op::Ann) {
                WorldSet A = eval(W, f->l);
                if (A.empty()) {
                    out = W;
                } else {
                    out = (W - A) | eval(A, f->r);
                }
            } else {
                out = eval_box(W, f->l);
            }
            memo_.emplace(std::move(key), out);
            return out;
        }
    }
    return WorldSet(m_.size());
}

WorldSet Checker::eval_box(const WorldSet& W, const Formula& body) {
    std::vector<WorldSet> parts;
    for (const auto& c : class_members_) {
        WorldSet x = c & W;
        if (!x.empty()) parts.push_back(std::move(x));
    }
    const std::size_t k = parts.size();
    if (k > max_classes_)
        throw ResourceExhausted("classes", std::to_string(k) + " valuation classes exceed the cap of " + std::to_string(max_classes_));
    WorldSet failed(m_.size());
    const std::uint64_t lim = std::uint64_t{1} << k;
    for (std::uint64_t mask = 1; mask < lim; ++mask) {
        WorldSet U(m_.size());
        for (std::size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1u) U |= parts[i];
        if (U.subset_of(failed)) continue;
        failed |= U - eval(U, body);
        if (failed == W) break;
    }
    return W - failed;
}

bool check(const Model& m, int w, const Formula& f) {
    if (w < 0 || static_cast<std::size_t>(w) >= m.size()) throw ModelError("unknown world index " + std::to_string(w));
    Checker c(m);
    return c.holds(w, f);
}

bool check(const Model& m, const std::string& world, const Formula& f) { return check(m, m.world_index(world), f); }

WorldSet extension(const Model& m, const Formula& f) {
    Checker c(m);
    return c.extension(f);
}

BooleanBoxReport bounded_boolean_box(const Model& m, int s, const Formula& body, std::size_t max_len) {
    std::vector<Formula> atoms;
    for (const auto& [p, d] : m.valuation) atoms.push_back(atom(p));
    if (atoms.empty()) atoms.push_back(atom("unstored_atom"));

    Checker chk(m);
    // by_size[n] holds (formula, extension) pairs of exactly n symbols whose
    // extension was new when generated.
    std::vector<std::vector<std::pair<Formula, WorldSet>>> by_size(max_len + 1);
    std::set<WorldSet> seen;
    auto offer = [&](std::size_t n, Formula f) {
        WorldSet e = chk.extension(f);
        if (seen.insert(e).second) by_size[n].emplace_back(std::move(f), std::move(e));
    };
    for (std::size_t n = 1; n <= max_len; ++n) {
        if (n == 1)
            for (const auto& a : atoms) offer(1, a);
        if (n >= 2)
            for (const auto& [f, e] : std::vector(by_size[n - 1])) offer(n, neg(f));
        for (std::size_t i = 1; i + 1 < n; ++i) {
            std::size_t j = n - 1 - i;
            if (j < 1) continue;
            auto left = by_size[i];
            auto right = by_size[j];
            for (const auto& [f, e] : left)
                for (const auto& [g, e2] : right) offer(n, conj(f, g));
        }
    }
    BooleanBoxReport rep;
    rep.candidates = seen.size();
    auto classes = valuation_classes(m);
    rep.saturated = classes.size() < 63 && seen.size() == (std::size_t{1} << classes.size());
    for (const auto& level : by_size)
        for (const auto& [f, e] : level) {
            if (!e.test(static_cast<std::size_t>(s))) continue;
            if (!chk.holds(s, ann(f, body))) {
                rep.value = false;
                return rep;
            }
        }
    return rep;
}

}  // namespace bapal
