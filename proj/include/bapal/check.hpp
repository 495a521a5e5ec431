#pragma once

#include <cstddef>
#include <unordered_map>

#include "bapal/budget.hpp"
#include "bapal/formula.hpp"
#include "bapal/model.hpp"
#include "bapal/worldset.hpp"

namespace bapal {

// Model checker over one fixed model. Restrictions are represented by the
// surviving world set W; extension(W, f) is [[f]] in the model restricted
// to W. The box clause quantifies over unions of valuation classes of W
// that contain the evaluation world, which coincides with quantifying over
// all Booleans because two worlds agreeing on every stored atom satisfy
// the same Booleans. Results for Box and Ann nodes are memoized on (W, f).
class Checker {
public:
    explicit Checker(const Model& m, const Deadline* deadline = nullptr, std::size_t max_classes = 22);

    WorldSet extension(const WorldSet& W, const Formula& f);
    WorldSet extension(const Formula& f) { return extension(m_.all(), f); }
    bool holds(int w, const Formula& f);
    bool holds_in(const WorldSet& W, int w, const Formula& f);

    const Model& model() const { return m_; }
    std::size_t memo_size() const { return memo_.size(); }

private:
    struct Key {
        WorldSet w;
        Formula f;  // owning, so node addresses are never reused while memoized
        bool operator==(const Key& o) const { return f.get() == o.f.get() && w == o.w; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept {
            return k.w.hash() ^ (reinterpret_cast<std::size_t>(k.f.get()) * 0x9e3779b97f4a7c15ULL);
        }
    };

    WorldSet eval(const WorldSet& W, const Formula& f);
    WorldSet eval_box(const WorldSet& W, const Formula& body);

    const Model& m_;
    const Deadline* deadline_;
    std::size_t max_classes_;
    std::vector<int> cls_;                 // valuation class per world
    std::vector<WorldSet> class_members_;  // by class id
    std::unordered_map<Key, WorldSet, KeyHash> memo_;
};

bool check(const Model& m, int w, const Formula& f);
bool check(const Model& m, const std::string& world, const Formula& f);
WorldSet extension(const Model& m, const Formula& f);

// Oracle for the box clause: quantifies over explicitly generated Boolean
// formulas over the stored atoms, in order of size up to max_len symbols,
// keeping one formula per extension. Each candidate b is tested literally
// as check(m, s, [b] body).
struct BooleanBoxReport {
    bool value = true;
    std::size_t candidates = 0;       // distinct extensions tried
    bool saturated = false;           // every union of classes was reached
};
BooleanBoxReport bounded_boolean_box(const Model& m, int s, const Formula& body, std::size_t max_len);

}  // namespace bapal
