#pragma once

#include <cstddef>
#include <cstdint>

namespace antsim {

/// Counter-based random stream: every draw is a pure function of
/// (seed, agent, round, draw index), so results do not depend on the order
/// or thread in which agents are evaluated.
class KeyedRng {
public:
    explicit constexpr KeyedRng(std::uint64_t seed = 0) noexcept : seed_(seed) {}

    constexpr std::uint64_t seed() const noexcept { return seed_; }

    constexpr std::uint64_t bits(std::uint64_t agent, std::uint64_t round,
                                 std::uint64_t draw = 0) const noexcept {
        std::uint64_t h = mix(seed_ + 0x243F6A8885A308D3ull);
        h = mix(h ^ (agent + 0x13198A2E03707344ull));
        h = mix(h ^ (round + 0xA4093822299F31D0ull));
        h = mix(h ^ (draw + 0x082EFA98EC4E6C89ull));
        return h;
    }

    /// Uniform double in [0, 1).
    constexpr double uniform(std::uint64_t agent, std::uint64_t round,
                             std::uint64_t draw = 0) const noexcept {
        return static_cast<double>(bits(agent, round, draw) >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). n must be positive.
    constexpr std::size_t index(std::uint64_t agent, std::uint64_t round, std::size_t n,
                                std::uint64_t draw = 0) const noexcept {
        const unsigned __int128 wide =
            static_cast<unsigned __int128>(bits(agent, round, draw)) * n;
        return static_cast<std::size_t>(wide >> 64);
    }

private:
    // splitmix64 finalizer
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace antsim
