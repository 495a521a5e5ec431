#include "bapal/random.hpp"

#include <algorithm>
#include <stdexcept>

namespace bapal {

std::uint64_t bell_number(int n) {
    if (n < 0 || n > 25) throw std::out_of_range("bell_number: n out of range");
    // Bell triangle
    std::vector<std::uint64_t> row{1};
    for (int i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (std::uint64_t v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

namespace {
std::uint64_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}
}  // namespace

std::vector<int> random_set_partition(Rng& rng, int n) {
    std::vector<int> out(static_cast<std::size_t>(n), -1);
    std::vector<int> rest(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rest[static_cast<std::size_t>(i)] = i;
    int next_block = 0;
    while (!rest.empty()) {
        int m = static_cast<int>(rest.size());
        // size k of the block holding rest[0]: P(k) = C(m-1,k-1) B(m-k) / B(m)
        std::uint64_t total = bell_number(m);
        std::uint64_t r = rng.next() % total;
        int k = 1;
        for (; k <= m; ++k) {
            std::uint64_t w = binom(m - 1, k - 1) * bell_number(m - k);
            if (r < w) break;
            r -= w;
        }
        int first = rest.front();
        std::vector<int> others(rest.begin() + 1, rest.end());
        // partial Fisher-Yates for k-1 companions
        for (int i = 0; i < k - 1; ++i) {
            int j = i + rng.below(static_cast<int>(others.size()) - i);
            std::swap(others[static_cast<std::size_t>(i)], others[static_cast<std::size_t>(j)]);
        }
        out[static_cast<std::size_t>(first)] = next_block;
        for (int i = 0; i < k - 1; ++i) out[static_cast<std::size_t>(others[static_cast<std::size_t>(i)])] = next_block;
        ++next_block;
        std::vector<int> left;
        for (int x : rest)
            if (out[static_cast<std::size_t>(x)] < 0) left.push_back(x);
        rest = std::move(left);
    }
    return out;
}

Formula random_boolean(Rng& rng, const std::vector<std::string>& atoms, int depth) {
    if (depth <= 0 || rng.chance(1, 3)) return atom(atoms[static_cast<std::size_t>(rng.below(static_cast<int>(atoms.size())))]);
    switch (rng.below(3)) {
        case 0:
            return neg(random_boolean(rng, atoms, depth - 1));
        case 1:
            return conj(random_boolean(rng, atoms, depth - 1), random_boolean(rng, atoms, depth - 1));
        default:
            return disj(random_boolean(rng, atoms, depth - 1), random_boolean(rng, atoms, depth - 1));
    }
}

Formula random_formula(Rng& rng, const FormulaGenSpec& spec) {
    auto pick_atom = [&] { return atom(spec.atoms[static_cast<std::size_t>(rng.below(static_cast<int>(spec.atoms.size())))]); };
    if (spec.depth <= 0 || rng.chance(1, 5)) return pick_atom();
    FormulaGenSpec sub = spec;
    sub.depth = spec.depth - 1;
    std::vector<int> kinds{0, 1};
    if (spec.allow_know && !spec.agents.empty()) kinds.push_back(2);
    if (spec.allow_ann) kinds.push_back(3);
    if (spec.allow_box) kinds.push_back(4);
    switch (kinds[static_cast<std::size_t>(rng.below(static_cast<int>(kinds.size())))]) {
        case 0:
            return neg(random_formula(rng, sub));
        case 1:
            return conj(random_formula(rng, sub), random_formula(rng, sub));
        case 2: {
            const auto& a = spec.agents[static_cast<std::size_t>(rng.below(static_cast<int>(spec.agents.size())))];
            return know(a, random_formula(rng, sub));
        }
        case 3:
            return ann(random_formula(rng, sub), random_formula(rng, sub));
        default:
            return box(random_formula(rng, sub));
    }
}

}  // namespace bapal
