#pragma once

// GeomSearch: each agent picks a quarter-plane, takes one mandatory step,
// then walks a geometric number of longitudinal steps followed by a
// geometric number of lateral steps, and halts.

#include "antsim/engine.hpp"
#include "antsim/states.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace antsim::geom {

using Input = LocalInput<AgentState>;
using Enabled = EnabledSet<AgentState>;

struct QuadrantMoves {
    Move longitudinal;
    Move lateral;
};

/// NE is (E, N); the other quadrants are its rotations.
inline constexpr QuadrantMoves quadrant_moves(Quadrant q) noexcept {
    switch (q) {
        case Quadrant::NE: return {Move::E, Move::N};
        case Quadrant::NW: return {Move::N, Move::W};
        case Quadrant::SW: return {Move::W, Move::S};
        case Quadrant::SE: return {Move::S, Move::E};
    }
    return {Move::P, Move::P};
}

inline constexpr Quadrant quadrants[] = {Quadrant::NE, Quadrant::NW, Quadrant::SW, Quadrant::SE};

/// Every transition of a walking agent moves it except the final halt, so a
/// cell at distance d is visited exactly d rounds after the walk begins.
/// Leg1's `last` bit carries the outcome of the longitudinal coin one round
/// ahead; that keeps the walk pause-free while the number of moves after the
/// first step stays the sum of two independent Geometric(1/2) counts.
inline Enabled transition(const AgentState& s, const Input&) {
    if (holds<GInit>(s)) {
        Enabled out;
        for (Quadrant q : quadrants) {
            out.insert(Leg1{q, false}, quadrant_moves(q).longitudinal);
            out.insert(Leg1{q, true}, quadrant_moves(q).longitudinal);
        }
        return out;
    }
    if (const auto* l1 = std::get_if<Leg1>(&s)) {
        const auto m = quadrant_moves(l1->q);
        if (!l1->last) return {{Leg1{l1->q, false}, m.longitudinal}, {Leg1{l1->q, true}, m.longitudinal}};
        return {{Leg2{l1->q}, m.lateral}, {GDone{}, Move::P}};
    }
    if (const auto* l2 = std::get_if<Leg2>(&s))
        return {{*l2, quadrant_moves(l2->q).lateral}, {GDone{}, Move::P}};
    if (holds<GDone>(s)) return {{s, Move::P}};
    throw ProtocolError("geom::transition called on a non-GeomSearch state");
}

/// Reference law of the walk length after the mandatory first step:
/// P(X = k) = (k + 1) 2^-(k + 2).
inline double walk_length_pmf(std::int64_t k) {
    if (k < 0) return 0.0;
    return static_cast<double>(k + 1) * std::ldexp(1.0, -static_cast<int>(k + 2));
}

/// Walks a single agent in isolation through the controller and the keyed
/// draw used by the engine; returns the number of moves after the first one.
/// Valid because GeomSearch never reads its sensed set.
inline std::int64_t sample_walk_length(const KeyedRng& rng, AgentId id,
                                       std::uint64_t start_round = 0) {
    AgentState state = GInit{};
    const Input empty({}, state, false, true, false);
    std::uint64_t round = start_round;
    std::int64_t moves = -1;
    for (;;) {
        const auto enabled = transition(state, empty);
        const auto& t = choose(enabled, rng, id, round++);
        if (t.move != Move::P) ++moves;
        state = t.state;
        if (holds<GDone>(state)) return moves;
    }
}

inline std::vector<std::int64_t> sample_walk_lengths(const KeyedRng& rng, std::size_t count) {
    std::vector<std::int64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = sample_walk_length(rng, static_cast<AgentId>(i));
    return out;
}

}  // namespace antsim::geom
