#pragma once

// RectSearch: five-agent teams sweep the diamond of one level at a time.
// Guides mark the four axis corners; the explorer zigzags between them and
// turns whenever it senses a stationary guide.

#include "antsim/engine.hpp"
#include "antsim/states.hpp"

#include <span>

namespace antsim::rect {

using Input = LocalInput<AgentState>;
using Enabled = EnabledSet<AgentState>;
using Step = Transition<AgentState>;

namespace detail {

inline bool senses_guide(const Input& in) {
    return in.any([](const AgentState& s) { return holds<Guide>(s); });
}
inline bool senses_moving_guide(const Input& in) {
    return in.any([](const AgentState& s) { return holds<MovingGuide>(s); });
}
inline bool senses_explorer(const Input& in) {
    return in.any([](const AgentState& s) { return holds<Explorer>(s); });
}

/// Walking rule shared by fresh guides and fresh explorers: leave the origin,
/// pass the block of stationary guides, and stop on the first cell beyond it
/// that holds neither a guide nor a moving guide. The first team stops one
/// cell out. Returns true when the walker stops on its current cell.
inline bool fresh_walker_stops(bool& seen_guide, bool first, const Input& in) {
    if (in.at_origin()) return false;
    if (first) return true;
    if (senses_guide(in)) {
        seen_guide = true;
        return false;
    }
    return seen_guide && !senses_moving_guide(in);
}

}  // namespace detail

struct LegMoves {
    Move first;
    Move second;
};

/// Zigzag move pair of each diamond side.
inline constexpr LegMoves leg_moves(Leg leg) noexcept {
    switch (leg) {
        case Leg::SW: return {Move::W, Move::S};
        case Leg::SE: return {Move::S, Move::E};
        case Leg::NE: return {Move::E, Move::N};
        case Leg::NW: return {Move::N, Move::W};
    }
    return {Move::P, Move::P};
}

inline constexpr Leg next_leg(Leg leg) noexcept {
    switch (leg) {
        case Leg::SW: return Leg::SE;
        case Leg::SE: return Leg::NE;
        case Leg::NE: return Leg::NW;
        case Leg::NW: return Leg::SW;
    }
    return Leg::SW;
}

/// First sweep state: the westward move off (0, d) has just been taken.
inline constexpr Explorer sweep_start() noexcept { return Explorer{Leg::SW, true}; }

inline Step fresh_guide_step(FreshGuide s, const Input& in) {
    if (detail::fresh_walker_stops(s.seen_guide, s.first, in)) return {Guide{s.dir}, Move::P};
    return {s, to_move(s.dir)};
}

inline Step guide_step(const Guide& s, const Input& in) {
    if (detail::senses_explorer(in)) return {MovingGuide{s.dir}, to_move(s.dir)};
    return {s, Move::P};
}

inline Step moving_guide_step(const MovingGuide& s, const Input& in) {
    if (detail::senses_guide(in)) return {s, to_move(s.dir)};
    return {Guide{s.dir}, Move::P};
}

inline Step fresh_explorer_step(FreshExplorer s, const Input& in) {
    if (detail::fresh_walker_stops(s.seen_guide, s.first, in)) return {sweep_start(), Move::W};
    return {s, Move::N};
}

inline Step explorer_step(const Explorer& s, const Input& in) {
    if (detail::senses_guide(in)) {
        if (s.leg == Leg::NW) return {MovingExplorer{}, Move::N};
        const Leg leg = next_leg(s.leg);
        return {Explorer{leg, true}, leg_moves(leg).first};
    }
    const auto moves = leg_moves(s.leg);
    return {Explorer{s.leg, !s.second}, s.second ? moves.second : moves.first};
}

inline Step moving_explorer_step(const MovingExplorer& s, const Input& in) {
    if (detail::senses_guide(in)) return {s, Move::N};
    return {sweep_start(), Move::W};
}

/// RectSearch branch of the controller. Every outcome is a singleton: the
/// strategy is deterministic given what an agent senses.
inline Enabled transition(const AgentState& s, const Input& in) {
    const Step t = std::visit(
        [&](const auto& v) -> Step {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FreshGuide>) return fresh_guide_step(v, in);
            else if constexpr (std::is_same_v<T, Guide>) return guide_step(v, in);
            else if constexpr (std::is_same_v<T, MovingGuide>) return moving_guide_step(v, in);
            else if constexpr (std::is_same_v<T, FreshExplorer>) return fresh_explorer_step(v, in);
            else if constexpr (std::is_same_v<T, Explorer>) return explorer_step(v, in);
            else if constexpr (std::is_same_v<T, MovingExplorer>) return moving_explorer_step(v, in);
            else if constexpr (std::is_same_v<T, Idle>) return {v, Move::P};
            else throw ProtocolError("rect::transition called on a non-RectSearch state");
        },
        s);
    return Enabled{t};
}

/// Freshly emitted state of a team member.
inline AgentState fresh_state(Role role, bool first) {
    switch (role) {
        case Role::Explorer: return FreshExplorer{false, first};
        case Role::GuideN: return FreshGuide{Dir::N, false, first};
        case Role::GuideE: return FreshGuide{Dir::E, false, first};
        case Role::GuideS: return FreshGuide{Dir::S, false, first};
        case Role::GuideW: return FreshGuide{Dir::W, false, first};
    }
    return Idle{};
}

inline constexpr Role team_roles[] = {Role::Explorer, Role::GuideN, Role::GuideE, Role::GuideS,
                                      Role::GuideW};

/// Turns five agents standing on the origin into one fresh team:
/// members[0] becomes the explorer, members[1..4] the N, E, S, W guides.
inline void emit_team(World<AgentState>& w, std::span<const AgentId> members, bool first) {
    if (members.size() < 5) throw UsageError("emit_team: a team needs five agents");
    if (members.size() > 5) throw UsageError("emit_team: a team has exactly five agents");
    for (std::size_t i = 0; i < 5; ++i) {
        auto it = std::find_if(w.agents.begin(), w.agents.end(),
                               [&](const auto& a) { return a.id == members[i]; });
        if (it == w.agents.end())
            throw UsageError("emit_team: unknown agent " + std::to_string(members[i]));
        if (it->pos != origin) throw UsageError("emit_team: team member is not on the origin");
        it->state = fresh_state(team_roles[i], first);
    }
}

}  // namespace antsim::rect
