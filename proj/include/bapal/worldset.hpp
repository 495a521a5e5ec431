#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace bapal {

// Fixed-universe bitset used for world sets, state sets and denotations.
class WorldSet {
public:
    WorldSet() = default;
    explicit WorldSet(std::size_t universe) : n_(universe), w_((universe + 63) / 64, 0) {}

    static WorldSet full(std::size_t universe) {
        WorldSet s(universe);
        for (std::size_t i = 0; i < universe; ++i) s.set(i);
        return s;
    }

    std::size_t universe() const { return n_; }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        if (v) w_[i >> 6] |= (std::uint64_t{1} << (i & 63));
        else w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    void reset(std::size_t i) { set(i, false); }

    bool empty() const {
        for (auto x : w_) if (x) return false;
        return true;
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto x : w_) c += static_cast<std::size_t>(__builtin_popcountll(x));
        return c;
    }
    bool subset_of(const WorldSet& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    bool intersects(const WorldSet& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    WorldSet& operator|=(const WorldSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    WorldSet& operator&=(const WorldSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    WorldSet& operator-=(const WorldSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }
    friend WorldSet operator|(WorldSet a, const WorldSet& b) { return a |= b; }
    friend WorldSet operator&(WorldSet a, const WorldSet& b) { return a &= b; }
    friend WorldSet operator-(WorldSet a, const WorldSet& b) { return a -= b; }

    std::vector<std::size_t> members() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t x = w_[k];
            while (x) {
                int b = __builtin_ctzll(x);
                out.push_back(k * 64 + static_cast<std::size_t>(b));
                x &= x - 1;
            }
        }
        return out;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t x = w_[k];
            while (x) {
                int b = __builtin_ctzll(x);
                f(k * 64 + static_cast<std::size_t>(b));
                x &= x - 1;
            }
        }
    }

    friend bool operator==(const WorldSet& a, const WorldSet& b) { return a.n_ == b.n_ && a.w_ == b.w_; }
    friend bool operator!=(const WorldSet& a, const WorldSet& b) { return !(a == b); }
    friend bool operator<(const WorldSet& a, const WorldSet& b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        return a.w_ < b.w_;
    }

    std::size_t hash() const {
        std::size_t h = n_ * 0x9e3779b97f4a7c15ULL;
        for (auto x : w_) h = (h ^ x) * 0x100000001b3ULL + (h >> 29);
        return h;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace bapal

template <>
struct std::hash<bapal::WorldSet> {
    std::size_t operator()(const bapal::WorldSet& s) const noexcept { return s.hash(); }
};
