#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bapal/formula.hpp"

namespace bapal {

// Seeded generator with platform-independent draws (std distributions are
// implementation-defined, so we do not use them).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}
    std::uint64_t next() { return g_(); }
    int below(int n) { return n <= 1 ? 0 : static_cast<int>(g_() % static_cast<std::uint64_t>(n)); }
    bool coin() { return (g_() >> 11) & 1u; }
    bool chance(int num, int den) { return below(den) < num; }

private:
    std::mt19937_64 g_;
};

std::uint64_t bell_number(int n);

// Uniformly random set partition of {0..n-1}, as a block id per element.
std::vector<int> random_set_partition(Rng& rng, int n);

struct FormulaGenSpec {
    std::vector<std::string> atoms{"p", "q"};
    std::vector<std::string> agents{"a", "b"};
    int depth = 3;
    bool allow_know = true;
    bool allow_ann = true;
    bool allow_box = true;
};

Formula random_formula(Rng& rng, const FormulaGenSpec& spec);
Formula random_boolean(Rng& rng, const std::vector<std::string>& atoms, int depth);

}  // namespace bapal
