#pragma once

#include "antsim/harness/config.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace antsim::harness {

struct Violation {
    std::uint64_t round = 0;
    std::string rule;
    std::string detail;
};

inline std::ostream& operator<<(std::ostream& os, const Violation& v) {
    return os << "round " << v.round << " [" << v.rule << "] " << v.detail;
}

/// Exploring agents in one round, split by type.
struct ExploringCount {
    std::uint32_t explorers = 0;
    std::uint32_t moving = 0;
    std::uint32_t fresh = 0;
    std::uint32_t total() const noexcept { return explorers + moving + fresh; }
};

struct LevelMetrics {
    std::map<std::int64_t, std::uint64_t> start;   // s_d
    std::map<std::int64_t, std::uint64_t> finish;  // f_d
    /// First round with no fresh explorer left, once any existed.
    std::optional<std::uint64_t> t0;
    /// Indexed by round (entry 0 is the initial configuration).
    std::vector<std::uint64_t> teams_emitted;
    std::vector<std::uint64_t> cells_explored;
    std::vector<ExploringCount> exploring;
    /// Levels whose sweep missed a cell of their diamond.
    std::vector<std::int64_t> coverage_failures;

    /// Smallest explorer share among exploring agents over rounds > t0;
    /// nullopt when no such round has an exploring agent.
    std::optional<double> min_exploring_fraction() const {
        if (!t0) return std::nullopt;
        std::optional<double> best;
        for (std::size_t r = *t0 + 1; r < exploring.size(); ++r) {
            const auto& e = exploring[r];
            if (e.total() == 0) continue;
            const double f = static_cast<double>(e.explorers) / e.total();
            if (!best || f < *best) best = f;
        }
        return best;
    }
};

struct EmissionMetrics {
    /// Round at which each emitted team appeared at the origin, in order.
    std::vector<std::uint64_t> team_rounds;
    /// First round at which ray cell x (x >= 1) held a Ready agent.
    std::map<std::int64_t, std::uint64_t> first_ready;

    std::uint64_t teams_by(std::uint64_t round) const {
        return static_cast<std::uint64_t>(
            std::upper_bound(team_rounds.begin(), team_rounds.end(), round) - team_rounds.begin());
    }
    /// Round by which cells 1..cells had all been Ready, if they have.
    std::optional<std::uint64_t> prefix_ready_round(std::int64_t cells) const {
        std::uint64_t worst = 0;
        for (std::int64_t x = 1; x <= cells; ++x) {
            auto it = first_ready.find(x);
            if (it == first_ready.end()) return std::nullopt;
            worst = std::max(worst, it->second);
        }
        return worst;
    }
};

struct RunMetrics {
    std::uint64_t run_id = 0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    Strategy strategy = Strategy::RectOracle;
    std::optional<std::int64_t> distance;
    std::optional<Coord> treasure;
    std::optional<std::uint64_t> discovery_round;
    std::uint64_t rounds_simulated = 0;
    std::optional<std::size_t> n_r;
    std::optional<std::size_t> n_g;
    std::vector<Violation> violations;
    LevelMetrics levels;
    EmissionMetrics emission;
};

inline constexpr const char* csv_header =
    "run_id,seed,n,strategy,D,treasure_x,treasure_y,discovery_round,rounds_simulated,t0,n_r,n_g,"
    "violations";

namespace detail {
template <class T>
void put_opt(std::ostream& os, const std::optional<T>& v) {
    if (v) os << *v;
}
}  // namespace detail

inline std::string csv_row(const RunMetrics& m) {
    std::ostringstream os;
    os << m.run_id << ',' << m.seed << ',' << m.n << ',' << strategy_name(m.strategy) << ',';
    detail::put_opt(os, m.distance);
    os << ',';
    if (m.treasure) os << m.treasure->x;
    os << ',';
    if (m.treasure) os << m.treasure->y;
    os << ',';
    detail::put_opt(os, m.discovery_round);
    os << ',' << m.rounds_simulated << ',';
    detail::put_opt(os, m.levels.t0);
    os << ',';
    detail::put_opt(os, m.n_r);
    os << ',';
    detail::put_opt(os, m.n_g);
    os << ',' << m.violations.size();
    return os.str();
}

}  // namespace antsim::harness
