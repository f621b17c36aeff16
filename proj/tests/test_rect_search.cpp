#include "antsim/emission.hpp"
#include "antsim/harness/experiment.hpp"
#include "antsim/hybrid.hpp"
#include "antsim/rect_search.hpp"

#include <gtest/gtest.h>

using namespace antsim;
using rect::transition;

namespace {

using In = Sensing<AgentState>;

Transition<AgentState> only(const AgentState& s, const In& in) {
    const auto e = transition(s, in.view(s));
    EXPECT_EQ(e.size(), 1u);
    return e[0];
}

void expect_step(const AgentState& s, const In& in, const AgentState& state, Move move) {
    const auto t = only(s, in);
    EXPECT_EQ(t.state, state) << "from " << s << " got " << t.state;
    EXPECT_EQ(t.move, move) << "from " << s;
}

/// Position of the lone explorer of a single oracle team at every round,
/// derived from the sweep geometry alone: the team is emitted at round 1,
/// the explorer reaches (0,1) at round 2 and starts level 1 there; each level
/// d is a diamond walk of 8d moves (legs of d (W,S), d (S,E), d (E,N) and
/// d (N,W) pairs), followed by one northward move to (0, d+1).
std::vector<Coord> single_team_explorer_path(std::uint64_t rounds) {
    std::vector<Coord> path{origin, origin, {0, 1}};  // rounds 0, 1, 2
    std::int64_t d = 1;
    Coord p{0, 1};
    const Move legs[4][2] = {{Move::W, Move::S}, {Move::S, Move::E}, {Move::E, Move::N}, {Move::N, Move::W}};
    while (path.size() <= rounds) {
        for (const auto& leg : legs)
            for (std::int64_t i = 0; i < d; ++i)
                for (Move m : leg) {
                    p = apply_move(p, m);
                    path.push_back(p);
                }
        p = apply_move(p, Move::N);
        path.push_back(p);
        ++d;
    }
    path.resize(rounds + 1);
    return path;
}

}  // namespace

TEST(Legs, MovePairsAndCycle) {
    EXPECT_EQ(rect::leg_moves(Leg::SW).first, Move::W);
    EXPECT_EQ(rect::leg_moves(Leg::SW).second, Move::S);
    EXPECT_EQ(rect::leg_moves(Leg::SE).first, Move::S);
    EXPECT_EQ(rect::leg_moves(Leg::NE).first, Move::E);
    EXPECT_EQ(rect::leg_moves(Leg::NW).first, Move::N);
    EXPECT_EQ(rect::leg_moves(Leg::NW).second, Move::W);
    Leg l = Leg::SW;
    for (int i = 0; i < 4; ++i) l = rect::next_leg(l);
    EXPECT_EQ(l, Leg::SW);
    EXPECT_EQ(rect::next_leg(Leg::NE), Leg::NW);
}

TEST(FreshGuide, Examples) {
    expect_step(FreshGuide{Dir::N, false, true}, In(), Guide{Dir::N}, Move::P);
    expect_step(FreshGuide{Dir::E, true, false}, In(), Guide{Dir::E}, Move::P);
    expect_step(FreshGuide{Dir::E, false, false}, In({Guide{Dir::E}}), FreshGuide{Dir::E, true, false}, Move::E);
}

TEST(FreshGuide, LeavesTheOriginAndHopsPastMovingGuides) {
    expect_step(FreshGuide{Dir::S, false, true}, In({}, true), FreshGuide{Dir::S, false, true}, Move::S);
    expect_step(FreshGuide{Dir::W, false, false}, In(), FreshGuide{Dir::W, false, false}, Move::W);
    expect_step(FreshGuide{Dir::W, true, false}, In({MovingGuide{Dir::W}}), FreshGuide{Dir::W, true, false},
                Move::W);
}

TEST(Guide, Examples) {
    expect_step(Guide{Dir::W}, In({Explorer{Leg::SW, false}}), MovingGuide{Dir::W}, Move::W);
    expect_step(Guide{Dir::N}, In(), Guide{Dir::N}, Move::P);
    expect_step(Guide{Dir::N}, In({FreshExplorer{true, false}}), Guide{Dir::N}, Move::P);
    expect_step(Guide{Dir::N}, In({MovingExplorer{}}), Guide{Dir::N}, Move::P);
}

TEST(MovingGuide, Examples) {
    expect_step(MovingGuide{Dir::S}, In({Guide{Dir::S}}), MovingGuide{Dir::S}, Move::S);
    expect_step(MovingGuide{Dir::S}, In(), Guide{Dir::S}, Move::P);
    expect_step(MovingGuide{Dir::N}, In({MovingExplorer{}}), Guide{Dir::N}, Move::P);
}

TEST(FreshExplorer, Examples) {
    expect_step(FreshExplorer{false, true}, In({FreshGuide{Dir::N, false, true}}), rect::sweep_start(), Move::W);
    expect_step(FreshExplorer{true, false}, In({MovingGuide{Dir::N}}), FreshExplorer{true, false}, Move::N);
    expect_step(FreshExplorer{false, false}, In({}, true), FreshExplorer{false, false}, Move::N);
    expect_step(FreshExplorer{false, false}, In({Guide{Dir::N}}), FreshExplorer{true, false}, Move::N);
    expect_step(FreshExplorer{true, false}, In(), rect::sweep_start(), Move::W);
}

TEST(Explorer, Examples) {
    // West corner: the SE leg starts with its S move.
    expect_step(Explorer{Leg::SW, false}, In({Guide{Dir::W}}), Explorer{Leg::SE, true}, Move::S);
    expect_step(Explorer{Leg::SE, true}, In({Guide{Dir::S}}), Explorer{Leg::NE, true}, Move::E);
    expect_step(Explorer{Leg::NE, false}, In({Guide{Dir::E}}), Explorer{Leg::NW, true}, Move::N);
    expect_step(Explorer{Leg::NW, false}, In({Guide{Dir::N}}), MovingExplorer{}, Move::N);
    // Off the axes the explorer zigzags: after the W move off (0, d) comes S.
    expect_step(rect::sweep_start(), In(), Explorer{Leg::SW, false}, Move::S);
    expect_step(Explorer{Leg::SW, false}, In(), Explorer{Leg::SW, true}, Move::W);
}

TEST(MovingExplorer, Examples) {
    expect_step(MovingExplorer{}, In({Guide{Dir::N}}), MovingExplorer{}, Move::N);
    expect_step(MovingExplorer{}, In({MovingGuide{Dir::N}}), rect::sweep_start(), Move::W);
    expect_step(MovingExplorer{}, In({Guide{Dir::N}, MovingGuide{Dir::N}}), MovingExplorer{}, Move::N);
}

TEST(Idle, StaysPut) { expect_step(Idle{}, In({}, true), Idle{}, Move::P); }

TEST(EmitTeam, Examples) {
    auto w = init_world<AgentState>(10, Idle{});
    const AgentId first[] = {0, 1, 2, 3, 4};
    rect::emit_team(w, first, true);
    EXPECT_EQ(w.agents[0].state, AgentState(FreshExplorer{false, true}));
    EXPECT_EQ(w.agents[1].state, AgentState(FreshGuide{Dir::N, false, true}));
    EXPECT_EQ(w.agents[2].state, AgentState(FreshGuide{Dir::E, false, true}));
    EXPECT_EQ(w.agents[3].state, AgentState(FreshGuide{Dir::S, false, true}));
    EXPECT_EQ(w.agents[4].state, AgentState(FreshGuide{Dir::W, false, true}));

    const AgentId second[] = {5, 6, 7, 8, 9};
    rect::emit_team(w, second, false);
    EXPECT_EQ(w.agents[5].state, AgentState(FreshExplorer{false, false}));
    EXPECT_EQ(w.agents[9].state, AgentState(FreshGuide{Dir::W, false, false}));
    for (const auto& a : w.agents) EXPECT_FALSE(holds<Idle>(a.state));
}

TEST(EmitTeam, Errors) {
    auto w = init_world<AgentState>(6, Idle{});
    const AgentId four[] = {0, 1, 2, 3};
    EXPECT_THROW(rect::emit_team(w, four, false), UsageError);
    const AgentId six[] = {0, 1, 2, 3, 4, 5};
    EXPECT_THROW(rect::emit_team(w, six, false), UsageError);
    const AgentId unknown[] = {0, 1, 2, 3, 42};
    EXPECT_THROW(rect::emit_team(w, unknown, false), UsageError);
    w.agents[4].pos = {1, 0};
    const AgentId off[] = {0, 1, 2, 3, 4};
    EXPECT_THROW(rect::emit_team(w, off, false), UsageError);
}

TEST(RectRun, SingleTeamExplorerFollowsTheDiamondOracle) {
    constexpr std::uint64_t rounds = 600;
    const auto expected = single_team_explorer_path(rounds);
    auto w = init_world<AgentState>(5, Idle{});
    const emission::OracleEmission oracle;
    oracle(w);
    const KeyedRng rng(1);
    for (std::uint64_t r = 1; r <= rounds; ++r) {
        w = step(w, AntsController{}, rng);
        oracle(w);
        // The explorer is the first member of the single team: agent 0.
        ASSERT_EQ(w.agents[0].pos, expected[r]) << "round " << r << " state " << w.agents[0].state;
    }
}

TEST(RectRun, SingleTeamLevelTimes) {
    harness::RunConfig cfg;
    cfg.n = 5;
    cfg.max_rounds = 1200;
    const auto m = harness::run_experiment(cfg);
    EXPECT_TRUE(m.violations.empty());
    const auto& start = m.levels.start;
    const auto& finish = m.levels.finish;
    // The first explorer starts level 1 at time 2d = 2.
    ASSERT_TRUE(start.contains(1));
    EXPECT_EQ(start.at(1), 2u);
    ASSERT_GE(finish.size(), 10u);
    for (const auto& [d, f] : finish) {
        EXPECT_EQ(f - start.at(d), static_cast<std::uint64_t>(8 * d)) << "level " << d;
        if (start.contains(d + 1)) {
            EXPECT_EQ(start.at(d + 1) - f, 1u) << "level " << d;
        }
    }
}

TEST(RectRun, SecondTeamFreshGuideStepsPastEachBlockCellOnce) {
    // Two oracle teams; agent 7 is the second team's east guide. While fresh
    // it advances one cell east every round, never pausing on a block cell.
    auto w = init_world<AgentState>(10, Idle{});
    const emission::OracleEmission oracle;
    const KeyedRng rng(1);
    std::vector<Coord> fresh_path;
    for (int r = 1; r <= 40; ++r) {
        w = step(w, AntsController{}, rng);
        oracle(w);
        if (holds<FreshGuide>(w.agents[7].state)) fresh_path.push_back(w.agents[7].pos);
    }
    ASSERT_GE(fresh_path.size(), 2u);
    EXPECT_EQ(fresh_path.front(), origin);
    for (std::size_t i = 1; i < fresh_path.size(); ++i)
        EXPECT_EQ(fresh_path[i], (Coord{fresh_path[i - 1].x + 1, 0}));
    EXPECT_EQ(w.agents[7].state, AgentState(Guide{Dir::E}));
    // The first team's east guide sits at (1,0) until swept, so the second
    // one stops just past it.
    EXPECT_GE(w.agents[7].pos.x, 2);
}

TEST(RectRun, SingleTeamFindsEveryPlacementOnALevel) {
    for (std::int64_t d : {1, 2, 5, 9}) {
        for (std::int64_t i = 0; i < 4 * d; ++i) {
            harness::RunConfig cfg;
            cfg.n = 5;
            cfg.treasure = harness::treasure::OnLevel{d, i};
            cfg.max_rounds = 100000;
            cfg.assert_invariants = false;
            const auto m = harness::run_experiment(cfg);
            ASSERT_TRUE(m.discovery_round) << "d=" << d << " i=" << i;
        }
    }
}

TEST(RectRun, FiniteControl) {
    // Distinct states seen over runs of every size stay inside Q.
    std::set<AgentState> seen_small, seen_large;
    for (auto [n, set] : {std::pair{20u, &seen_small}, std::pair{200u, &seen_large}}) {
        auto w = init_world<AgentState>(n, Idle{});
        const emission::OracleEmission oracle;
        oracle(w);
        for (int r = 0; r < 800; ++r) {
            w = step(w, AntsController{}, KeyedRng(1));
            oracle(w);
            for (const auto& a : w.agents) set->insert(a.state);
        }
    }
    EXPECT_LE(seen_small.size(), state_space_size());
    EXPECT_LE(seen_large.size(), state_space_size());
    // Oracle RectSearch only ever uses Idle and the six agent types with their bits.
    EXPECT_LE(seen_large.size(), 1u + 16 + 4 + 4 + 4 + 8 + 1);
}
