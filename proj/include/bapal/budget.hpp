#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace bapal {

// Thrown when a configured cap is hit. `dimension` names the cap:
// "wall_time", "states", "hue_denotations", "recursion_nodes", "classes".
class ResourceExhausted : public std::runtime_error {
public:
    ResourceExhausted(std::string dimension, const std::string& detail)
        : std::runtime_error(dimension + ": " + detail), dimension_(std::move(dimension)) {}
    const std::string& dimension() const { return dimension_; }

private:
    std::string dimension_;
};

class Deadline {
public:
    Deadline() = default;
    explicit Deadline(double seconds)
        : active_(seconds > 0),
          end_(std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds))) {}

    bool expired() const { return active_ && std::chrono::steady_clock::now() > end_; }

    // Cheap enough for hot loops: consults the clock every 256 calls.
    void poll() const {
        if (!active_) return;
        if ((++tick_ & 0xff) != 0) return;
        if (expired()) throw ResourceExhausted("wall_time", "deadline passed");
    }

private:
    bool active_ = false;
    std::chrono::steady_clock::time_point end_{};
    mutable std::uint32_t tick_ = 0;
};

}  // namespace bapal
