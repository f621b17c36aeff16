#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string_view>

namespace antsim {

/// A cell of the infinite grid. The origin is (0, 0).
struct Coord {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend constexpr bool operator==(const Coord&, const Coord&) = default;
    friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

inline constexpr Coord origin{0, 0};

inline std::ostream& operator<<(std::ostream& os, const Coord& c) {
    return os << '(' << c.x << ',' << c.y << ')';
}

/// Position transitions: the four cardinal neighbours, or stay put.
enum class Move : std::uint8_t { N, S, E, W, P };

inline constexpr std::string_view move_name(Move m) noexcept {
    switch (m) {
        case Move::N: return "N";
        case Move::S: return "S";
        case Move::E: return "E";
        case Move::W: return "W";
        case Move::P: return "P";
    }
    return "?";
}

inline constexpr std::int64_t l1_distance(Coord a, Coord b) noexcept {
    const auto dx = a.x - b.x;
    const auto dy = a.y - b.y;
    return (dx < 0 ? -dx : dx) + (dy < 0 ? -dy : dy);
}

inline constexpr std::int64_t l1_norm(Coord c) noexcept { return l1_distance(c, origin); }

inline constexpr Coord apply_move(Coord c, Move m) noexcept {
    switch (m) {
        case Move::N: return {c.x, c.y + 1};
        case Move::S: return {c.x, c.y - 1};
        case Move::E: return {c.x + 1, c.y};
        case Move::W: return {c.x - 1, c.y};
        case Move::P: return c;
    }
    return c;
}

struct CoordHash {
    std::size_t operator()(const Coord& c) const noexcept {
        auto h = static_cast<std::uint64_t>(c.x) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(c.y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

}  // namespace antsim
