#pragma once

// HybridSearch: one fair coin per agent splits the colony between
// RectSearch (with PSTA emission) and GeomSearch. Each branch senses only
// states of its own family, so the two groups never influence each other.

#include "antsim/emission.hpp"
#include "antsim/engine.hpp"
#include "antsim/geom_search.hpp"
#include "antsim/rect_search.hpp"
#include "antsim/states.hpp"

namespace antsim {

namespace hybrid {

using Input = LocalInput<AgentState>;
using Enabled = EnabledSet<AgentState>;

inline bool same_family(const AgentState& self, const AgentState& other) {
    return family_of(self) == family_of(other);
}

inline Enabled coin(const AgentState&, const Input&) {
    return {{emission::initial_elector(), Move::P}, {GInit{}, Move::P}};
}

}  // namespace hybrid

/// The controller for every shipped strategy. The state families are
/// disjoint, so one transition function covers RectSearch (oracle or PSTA
/// emission), GeomSearch and HybridSearch; the strategy only decides the
/// initial state.
struct AntsController {
    EnabledSet<AgentState> operator()(const AgentState& s, const LocalInput<AgentState>& raw) const {
        if (holds<HInit>(s)) return hybrid::coin(s, raw);
        const auto in = raw.filtered(&hybrid::same_family);
        if (family_of(s) == Family::Geom) return geom::transition(s, in);
        if (emission::is_elector_family(s)) return emission::psta_step(s, in);
        return rect::transition(s, in);
    }
};

}  // namespace antsim
