#pragma once

// Emission schemes: how five-agent teams leave the origin.
//
// The oracle scheme releases one team per round from outside the protocol.
// PSTA does it with finite-state agents only: agents spread along the east
// ray until every cell holds a single elected agent, cells are dedicated to
// roles by their distance mod 5, and an innermost flag serializes the
// collection of each team and its walk back to the origin.

#include "antsim/engine.hpp"
#include "antsim/rect_search.hpp"
#include "antsim/states.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace antsim::emission {

using Input = LocalInput<AgentState>;
using Enabled = EnabledSet<AgentState>;

enum class EmissionMode : std::uint8_t { Oracle, Psta };

/// Role dedicated to a ray cell at distance d, given d mod 5.
inline constexpr Role role_of(int dist_mod5) noexcept {
    switch (((dist_mod5 % 5) + 5) % 5) {
        case 1: return Role::Explorer;
        case 2: return Role::GuideN;
        case 3: return Role::GuideE;
        case 4: return Role::GuideS;
        default: return Role::GuideW;
    }
}

/// Initial PSTA state s0.
inline constexpr AgentState initial_elector() noexcept { return AtOriginElector{}; }

// ---- oracle scheme --------------------------------------------------------

/// Barrier hook realizing the ideal emission function f(t) = t: at each round
/// t = 1, 2, ... it turns five Idle agents on the origin into a fresh team,
/// until fewer than five remain. `teams_per_round` > 1 exists only to inject
/// faults into the invariant checker.
class OracleEmission {
public:
    explicit OracleEmission(unsigned teams_per_round = 1) : teams_per_round_(teams_per_round) {}

    void operator()(World<AgentState>& w) const {
        if (w.round == 0) return;
        for (unsigned k = 0; k < teams_per_round_; ++k) {
            std::vector<AgentId> team;
            for (const auto& a : w.agents) {
                if (holds<Idle>(a.state) && a.pos == origin) team.push_back(a.id);
                if (team.size() == 5) break;
            }
            if (team.size() < 5) return;
            rect::emit_team(w, team, w.round == 1 && k == 0);
        }
    }

private:
    unsigned teams_per_round_;
};

// ---- PSTA: flatten-stream election ----------------------------------------

namespace detail {

inline bool senses_ready(const Input& in) {
    return in.any([](const AgentState& s) { return holds<Ready>(s); });
}
inline bool senses_competitor(const Input& in) {
    return in.any([](const AgentState& s) { return is_competing_elector(s); });
}
inline bool senses_stay_intent(const Input& in) {
    return in.any([](const AgentState& s) {
        if (const auto* e = std::get_if<Elector>(&s)) return e->decision == Decision::Stay;
        if (const auto* o = std::get_if<AtOriginElector>(&s)) return o->decision == Decision::Stay;
        return false;
    });
}

/// An agent next to the origin that sees the origin's last leaver knows no
/// elector will ever enter its cell again.
inline bool senses_origin_drained(const Input& in) {
    return in.any([](const AgentState& s) {
        const auto* e = std::get_if<Elector>(&s);
        return e != nullptr && e->adj_origin && e->origin_empty;
    });
}

/// Whether a committed decision moves the agent east this round. A coin
/// "move" only goes through when someone else in the cell stays behind.
inline bool commit_moves(Decision d, const Input& in) {
    switch (d) {
        case Decision::Forced: return true;
        case Decision::Move: return senses_stay_intent(in) || senses_ready(in);
        default: return false;
    }
}

}  // namespace detail

inline Enabled at_origin_elector_step(const AtOriginElector& s, const Input& in) {
    if (s.phase == Phase::Intent) {
        if (!detail::senses_competitor(in))
            return {{AtOriginElector{Phase::Commit, Decision::Forced}, Move::P}};
        return {{AtOriginElector{Phase::Commit, Decision::Move}, Move::P},
                {AtOriginElector{Phase::Commit, Decision::Stay}, Move::P}};
    }
    if (detail::commit_moves(s.decision, in)) {
        // A forced departure from the origin is always the last one.
        const bool last = s.decision == Decision::Forced;
        return {{Elector{Phase::Intent, Decision::None, 1, true, last}, Move::E}};
    }
    return {{AtOriginElector{}, Move::P}};
}

inline Enabled elector_step(const Elector& s, const Input& in) {
    Elector cur = s;
    if (cur.adj_origin && detail::senses_origin_drained(in)) cur.origin_empty = true;
    if (cur.phase == Phase::Intent) {
        Elector next = cur;
        next.phase = Phase::Commit;
        if (detail::senses_ready(in)) {
            next.decision = Decision::Forced;
            return {{next, Move::P}};
        }
        if (!in.at_origin() && !detail::senses_competitor(in)) {
            const bool flag = cur.adj_origin && cur.origin_empty;
            return {{Ready{role_of(cur.dist_mod5), flag, cur.adj_origin}, Move::P}};
        }
        Elector stay = next;
        next.decision = Decision::Move;
        stay.decision = Decision::Stay;
        return {{next, Move::P}, {stay, Move::P}};
    }
    if (detail::commit_moves(cur.decision, in)) {
        const auto mod5 = static_cast<std::uint8_t>((cur.dist_mod5 + 1) % 5);
        return {{Elector{Phase::Intent, Decision::None, mod5, false, false}, Move::E}};
    }
    cur.phase = Phase::Intent;
    cur.decision = Decision::None;
    return {{cur, Move::P}};
}

/// Intent/commit flatten-stream controller for the two elector variants.
inline Enabled flatten_stream_step(const AgentState& s, const Input& in) {
    if (const auto* o = std::get_if<AtOriginElector>(&s)) return at_origin_elector_step(*o, in);
    if (const auto* e = std::get_if<Elector>(&s)) return elector_step(*e, in);
    throw ProtocolError("flatten_stream_step called on a non-elector state");
}

// ---- PSTA: collection, flag handoff, return --------------------------------

namespace detail {

/// Guide role collected when a collector holding k guides reaches a cell.
inline constexpr Role expected_guide(int collected) noexcept {
    return static_cast<Role>(collected + 1);
}

inline std::optional<Collector> sensed_collector(const Input& in) {
    std::optional<Collector> found;
    in.any([&](const AgentState& s) {
        if (const auto* c = std::get_if<Collector>(&s)) found = *c;
        return found.has_value();
    });
    return found;
}

inline bool senses_ready_role(const Input& in, Role role) {
    return in.any([&](const AgentState& s) {
        const auto* r = std::get_if<Ready>(&s);
        return r != nullptr && r->role == role;
    });
}

}  // namespace detail

/// Collection only advances out of a cell once no elector is left in it, so
/// that no elector is ever behind a collector and no cell is elected twice.
inline Enabled ready_step(const Ready& s, const Input& in) {
    const bool quiet = !detail::senses_competitor(in);
    if (s.role == Role::Explorer) {
        if (s.flag && quiet) return {{Collector{0, s.adj_origin}, Move::E}};
        if (in.any([](const AgentState& q) { return holds<FlagTrip>(q); }) ||
            (s.adj_origin && detail::senses_origin_drained(in))) {
            Ready flagged = s;
            flagged.flag = true;
            return {{flagged, Move::P}};
        }
        return {{s, Move::P}};
    }
    const auto c = detail::sensed_collector(in);
    if (quiet && c && detail::expected_guide(c->collected) == s.role)
        return {{CollectedGuide{s.role}, c->collected < 3 ? Move::E : Move::P}};
    return {{s, Move::P}};
}

inline Enabled collector_step(const Collector& s, const Input& in) {
    if (!detail::senses_ready_role(in, detail::expected_guide(s.collected)) || detail::senses_competitor(in))
        return {{s, Move::P}};  // election in this cell is not over yet
    if (s.collected < 3)
        return {{Collector{static_cast<std::uint8_t>(s.collected + 1), s.first}, Move::E}};
    return {{FlagTrip{s.first}, Move::E}};
}

inline Enabled collected_guide_step(const CollectedGuide& s, const Input& in) {
    FlagReturn back;
    const bool returned = in.any([&](const AgentState& q) {
        if (const auto* f = std::get_if<FlagReturn>(&q)) {
            back = *f;
            return true;
        }
        return false;
    });
    if (returned) return {{TeamReturn{s.role, back.first}, Move::W}};
    const auto c = detail::sensed_collector(in);
    if (c && c->collected < 3 && detail::senses_ready_role(in, detail::expected_guide(c->collected)) &&
        !detail::senses_competitor(in))
        return {{s, Move::E}};
    return {{s, Move::P}};
}

inline Enabled flag_trip_step(const FlagTrip& s, const Input& in) {
    if (detail::senses_ready_role(in, Role::Explorer)) return {{FlagReturn{s.first}, Move::W}};
    if (detail::senses_competitor(in)) return {{s, Move::P}};
    // Nobody is electing here: the stream ended before this cell.
    return {{FlagReturn{s.first}, Move::W}};
}

inline Enabled team_return_step(const TeamReturn& s, const Input& in) {
    if (in.at_origin()) return {{rect::fresh_state(s.role, s.first), Move::P}};
    return {{s, Move::W}};
}

/// Full PSTA controller over the elector family.
inline Enabled psta_step(const AgentState& s, const Input& in) {
    return std::visit(
        [&](const auto& v) -> Enabled {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, AtOriginElector>) return at_origin_elector_step(v, in);
            else if constexpr (std::is_same_v<T, Elector>) return elector_step(v, in);
            else if constexpr (std::is_same_v<T, Ready>) return ready_step(v, in);
            else if constexpr (std::is_same_v<T, Collector>) return collector_step(v, in);
            else if constexpr (std::is_same_v<T, CollectedGuide>) return collected_guide_step(v, in);
            else if constexpr (std::is_same_v<T, FlagTrip>) return flag_trip_step(v, in);
            else if constexpr (std::is_same_v<T, FlagReturn>)
                return {{TeamReturn{Role::Explorer, v.first}, Move::W}};
            else if constexpr (std::is_same_v<T, TeamReturn>) return team_return_step(v, in);
            else throw ProtocolError("psta_step called on a non-elector state");
        },
        s);
}

inline bool is_elector_family(const AgentState& s) noexcept {
    return holds<AtOriginElector>(s) || holds<Elector>(s) || holds<Ready>(s) ||
           holds<Collector>(s) || holds<CollectedGuide>(s) || holds<FlagTrip>(s) ||
           holds<FlagReturn>(s) || holds<TeamReturn>(s);
}

}  // namespace antsim::emission
