#pragma once

// The finite state set Q shared by every shipped protocol. Each algorithm
// owns a disjoint family of alternatives; all fields are bounded enums or
// bits, so Q is finite and independent of n, D and the round count.

#include "antsim/grid.hpp"

#include <cstdint>
#include <iterator>
#include <ostream>
#include <string_view>
#include <variant>

namespace antsim {

// ---- RectSearch -----------------------------------------------------------

/// Outward direction of a guide.
enum class Dir : std::uint8_t { N, E, S, W };

/// Current side of the diamond being swept. Cycles SW -> SE -> NE -> NW.
enum class Leg : std::uint8_t { SW, SE, NE, NW };

inline constexpr Move to_move(Dir d) noexcept {
    switch (d) {
        case Dir::N: return Move::N;
        case Dir::E: return Move::E;
        case Dir::S: return Move::S;
        case Dir::W: return Move::W;
    }
    return Move::P;
}

struct FreshGuide {
    Dir dir = Dir::N;
    bool seen_guide = false;
    bool first = false;
    friend auto operator<=>(const FreshGuide&, const FreshGuide&) = default;
};

struct Guide {
    Dir dir = Dir::N;
    friend auto operator<=>(const Guide&, const Guide&) = default;
};

struct MovingGuide {
    Dir dir = Dir::N;
    friend auto operator<=>(const MovingGuide&, const MovingGuide&) = default;
};

struct FreshExplorer {
    bool seen_guide = false;
    bool first = false;
    friend auto operator<=>(const FreshExplorer&, const FreshExplorer&) = default;
};

struct Explorer {
    Leg leg = Leg::SW;
    /// The next zigzag move is the second move of the leg's pair.
    bool second = false;
    friend auto operator<=>(const Explorer&, const Explorer&) = default;
};

struct MovingExplorer {
    friend auto operator<=>(const MovingExplorer&, const MovingExplorer&) = default;
};

/// Unemitted agent held at the origin by the oracle emission scheme.
struct Idle {
    friend auto operator<=>(const Idle&, const Idle&) = default;
};

// ---- PSTA emission --------------------------------------------------------

/// Job an elected agent fills in its search team; fixed by the distance of
/// its election cell modulo 5.
enum class Role : std::uint8_t { Explorer, GuideN, GuideE, GuideS, GuideW };

enum class Phase : std::uint8_t { Intent, Commit };
enum class Decision : std::uint8_t { None, Move, Stay, Forced };

struct AtOriginElector {
    Phase phase = Phase::Intent;
    Decision decision = Decision::None;
    friend auto operator<=>(const AtOriginElector&, const AtOriginElector&) = default;
};

struct Elector {
    Phase phase = Phase::Intent;
    Decision decision = Decision::None;
    std::uint8_t dist_mod5 = 0;
    /// Still on the cell entered directly from the origin.
    bool adj_origin = false;
    /// Has shared a cell with the last agent to leave the origin.
    bool origin_empty = false;
    friend auto operator<=>(const Elector&, const Elector&) = default;
};

struct Ready {
    Role role = Role::Explorer;
    bool flag = false;
    bool adj_origin = false;
    friend auto operator<=>(const Ready&, const Ready&) = default;
};

struct Collector {
    std::uint8_t collected = 0;  // guides absorbed so far, 0..3
    bool first = false;
    friend auto operator<=>(const Collector&, const Collector&) = default;
};

struct FlagTrip {
    bool first = false;
    friend auto operator<=>(const FlagTrip&, const FlagTrip&) = default;
};

struct FlagReturn {
    bool first = false;
    friend auto operator<=>(const FlagReturn&, const FlagReturn&) = default;
};

struct CollectedGuide {
    Role role = Role::GuideN;
    friend auto operator<=>(const CollectedGuide&, const CollectedGuide&) = default;
};

struct TeamReturn {
    Role role = Role::Explorer;
    bool first = false;
    friend auto operator<=>(const TeamReturn&, const TeamReturn&) = default;
};

// ---- GeomSearch -----------------------------------------------------------

enum class Quadrant : std::uint8_t { NE, NW, SW, SE };

struct GInit {
    friend auto operator<=>(const GInit&, const GInit&) = default;
};

struct Leg1 {
    Quadrant q = Quadrant::NE;
    /// The longitudinal walk has ended; the next draw is for the lateral walk.
    bool last = false;
    friend auto operator<=>(const Leg1&, const Leg1&) = default;
};

struct Leg2 {
    Quadrant q = Quadrant::NE;
    friend auto operator<=>(const Leg2&, const Leg2&) = default;
};

struct GDone {
    friend auto operator<=>(const GDone&, const GDone&) = default;
};

// ---- HybridSearch ---------------------------------------------------------

struct HInit {
    friend auto operator<=>(const HInit&, const HInit&) = default;
};

using AgentState =
    std::variant<Idle, FreshGuide, Guide, MovingGuide, FreshExplorer, Explorer, MovingExplorer,
                 AtOriginElector, Elector, Ready, Collector, FlagTrip, FlagReturn,
                 CollectedGuide, TeamReturn, GInit, Leg1, Leg2, GDone, HInit>;

template <class T>
constexpr bool holds(const AgentState& s) noexcept {
    return std::holds_alternative<T>(s);
}

/// Hybrid branch a state belongs to. RectSearch and PSTA share a branch since
/// PSTA hands its teams over to RectSearch.
enum class Family : std::uint8_t { Undecided, Rect, Geom };

inline constexpr Family family_of(const AgentState& s) noexcept {
    if (holds<GInit>(s) || holds<Leg1>(s) || holds<Leg2>(s) || holds<GDone>(s)) return Family::Geom;
    if (holds<HInit>(s)) return Family::Undecided;
    return Family::Rect;
}

inline constexpr bool is_rect_type(const AgentState& s) noexcept {
    return holds<FreshGuide>(s) || holds<Guide>(s) || holds<MovingGuide>(s) ||
           holds<FreshExplorer>(s) || holds<Explorer>(s) || holds<MovingExplorer>(s);
}

inline constexpr bool is_competing_elector(const AgentState& s) noexcept {
    return holds<AtOriginElector>(s) || holds<Elector>(s);
}

/// Number of distinct values of Q; every observed state set is bounded by it.
inline constexpr std::size_t state_space_size() noexcept {
    return 1                // Idle
           + 4 * 2 * 2      // FreshGuide
           + 4 + 4          // Guide, MovingGuide
           + 2 * 2          // FreshExplorer
           + 4 * 2          // Explorer
           + 1              // MovingExplorer
           + 2 * 4          // AtOriginElector
           + 2 * 4 * 5 * 2 * 2  // Elector
           + 5 * 2 * 2      // Ready
           + 4 * 2          // Collector
           + 2 + 2          // FlagTrip, FlagReturn
           + 5              // CollectedGuide
           + 5 * 2          // TeamReturn
           + 1 + 4 * 2 + 4 + 1  // geom
           + 1;             // HInit
}

inline constexpr std::string_view tag_names[] = {
    "Idle",      "FreshGuide", "Guide",          "MovingGuide", "FreshExplorer", "Explorer",
    "MovingExplorer", "AtOriginElector", "Elector", "Ready", "Collector", "FlagTrip",
    "FlagReturn", "CollectedGuide", "TeamReturn", "GInit", "Leg1", "Leg2", "GDone", "HInit"};
static_assert(std::size(tag_names) == std::variant_size_v<AgentState>);

inline constexpr std::string_view tag_name(const AgentState& s) noexcept { return tag_names[s.index()]; }

inline constexpr std::string_view dir_name(Dir d) noexcept {
    constexpr std::string_view n[] = {"N", "E", "S", "W"};
    return n[static_cast<int>(d)];
}

inline constexpr std::string_view role_name(Role r) noexcept {
    constexpr std::string_view n[] = {"Explorer", "GuideN", "GuideE", "GuideS", "GuideW"};
    return n[static_cast<int>(r)];
}

inline std::ostream& operator<<(std::ostream& os, const AgentState& s) {
    os << tag_name(s);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FreshGuide>)
                os << '{' << dir_name(v.dir) << ",seen=" << v.seen_guide << ",first=" << v.first << '}';
            else if constexpr (std::is_same_v<T, Guide> || std::is_same_v<T, MovingGuide>)
                os << '{' << dir_name(v.dir) << '}';
            else if constexpr (std::is_same_v<T, FreshExplorer>)
                os << "{seen=" << v.seen_guide << ",first=" << v.first << '}';
            else if constexpr (std::is_same_v<T, Explorer>)
                os << "{leg=" << static_cast<int>(v.leg) << ",second=" << v.second << '}';
            else if constexpr (std::is_same_v<T, AtOriginElector>)
                os << "{phase=" << static_cast<int>(v.phase)
                   << ",decision=" << static_cast<int>(v.decision) << '}';
            else if constexpr (std::is_same_v<T, Elector>)
                os << "{phase=" << static_cast<int>(v.phase)
                   << ",decision=" << static_cast<int>(v.decision)
                   << ",mod5=" << static_cast<int>(v.dist_mod5) << ",adj=" << v.adj_origin
                   << ",drained=" << v.origin_empty << '}';
            else if constexpr (std::is_same_v<T, Ready>)
                os << '{' << role_name(v.role) << ",flag=" << v.flag << ",adj=" << v.adj_origin << '}';
            else if constexpr (std::is_same_v<T, Collector>)
                os << "{k=" << static_cast<int>(v.collected) << ",first=" << v.first << '}';
            else if constexpr (std::is_same_v<T, CollectedGuide>)
                os << '{' << role_name(v.role) << '}';
            else if constexpr (std::is_same_v<T, TeamReturn>)
                os << '{' << role_name(v.role) << ",first=" << v.first << '}';
            else if constexpr (std::is_same_v<T, Leg1>)
                os << "{q=" << static_cast<int>(v.q) << ",last=" << v.last << '}';
            else if constexpr (std::is_same_v<T, Leg2>)
                os << "{q=" << static_cast<int>(v.q) << '}';
        },
        s);
    return os;
}

}  // namespace antsim
