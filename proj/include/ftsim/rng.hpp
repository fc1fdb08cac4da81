#pragma once

#include <cmath>
#include <cstdint>

#include "ftsim/types.hpp"

namespace ftsim {

// splitmix64 finalizer: avalanche-quality 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic stream generator (splitmix64). A single u64 of state keeps
// entity snapshots small and trivially serializable, which matters because
// replica lockstep and migration both depend on exact state transfer.
class SplitMix64 {
public:
    SplitMix64() = default;
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_u01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n) without modulo bias (Lemire multiply-shift).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller.
    double next_normal() {
        double u1 = next_u01();
        double u2 = next_u01();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * kPi * u2);
    }

    std::uint64_t state() const { return state_; }
    void set_state(std::uint64_t s) { state_ = s; }

private:
    static constexpr double kPi = 3.14159265358979323846;
    std::uint64_t state_ = 0;
};

// Message latency in whole timesteps: round(lognormal(mu, sigma)), clamped
// so a message sent at t is never deliverable before t+1.
inline Timestep lognormal_delay(SplitMix64& rng, double mu, double sigma) {
    double sample = std::exp(mu + sigma * rng.next_normal());
    auto steps = static_cast<std::int64_t>(std::llround(sample));
    return steps < 1 ? Timestep{1} : static_cast<Timestep>(steps);
}

} // namespace ftsim
