#pragma once

// Ground-truth observers. They read true coordinates and full states; none of
// this is visible to the agents.

#include "antsim/emission.hpp"
#include "antsim/engine.hpp"
#include "antsim/harness/metrics.hpp"
#include "antsim/states.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace antsim::harness {

using AntWorld = World<AgentState>;
using AntObserver = Observer<AgentState>;

/// Bounded sink shared by the checking observers.
class ViolationLog {
public:
    explicit ViolationLog(std::vector<Violation>& out, std::size_t cap = 1000) : out_(out), cap_(cap) {}

    void add(std::uint64_t round, std::string rule, std::string detail) {
        ++total_;
        if (out_.size() < cap_) out_.push_back({round, std::move(rule), std::move(detail)});
    }
    std::size_t total() const noexcept { return total_; }

private:
    std::vector<Violation>& out_;
    std::size_t cap_;
    std::size_t total_ = 0;
};

namespace detail {

template <class... T>
std::string cat(const T&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
}

inline bool is_fresh(const AgentState& s) { return holds<FreshExplorer>(s) || holds<FreshGuide>(s); }

}  // namespace detail

/// All cells at L1 distance d from the origin.
inline std::vector<Coord> diamond_cells(std::int64_t d) {
    if (d < 1) throw UsageError("diamond_cells: d must be positive");
    std::vector<Coord> out;
    out.reserve(static_cast<std::size_t>(4 * d));
    for (std::int64_t x = -d; x <= d; ++x) {
        const std::int64_t r = d - (x < 0 ? -x : x);
        out.push_back({x, r});
        if (r != 0) out.push_back({x, -r});
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---- level recorder ---------------------------------------------------------

/// Start and finish rounds of every level sweep, sweep coverage, t0, team
/// emissions and explorer counts.
class LevelRecorder : public AntObserver {
public:
    /// Coverage is checked exactly for levels up to `coverage_limit`.
    LevelRecorder(LevelMetrics& out, ViolationLog& log, std::int64_t coverage_limit = 30)
        : out_(out), log_(log), coverage_limit_(coverage_limit) {}

    void on_start(const AntWorld& w) override { sample(w); }

    void on_step(const AntWorld& before, const AntWorld& after) override {
        std::uint64_t new_teams = 0;
        for (std::size_t i = 0; i < after.agents.size(); ++i) {
            const auto& a = before.agents[i];
            const auto& b = after.agents[i];
            if (holds<FreshExplorer>(b.state) && !holds<FreshExplorer>(a.state)) ++new_teams;
            if (holds<Explorer>(b.state) && a.pos.x == 0 && a.pos.y > 0 &&
                b.pos == Coord{-1, a.pos.y})
                begin_sweep(a.pos.y, before.round, b.id);
            if (holds<Explorer>(a.state) && b.pos.x == 0 && b.pos.y > 0 &&
                a.pos == Coord{1, b.pos.y})
                end_sweep(b.pos.y, after.round, b.id);
        }
        for (auto& [id, sw] : sweeps_) {
            const auto* rec = after.find(id);
            if (rec == nullptr || !holds<Explorer>(rec->state)) continue;
            const auto dist = l1_norm(rec->pos);
            if (dist != sw.level && dist != sw.level + 1)
                log_.add(after.round, "sweep-band",
                         detail::cat("explorer ", id, " sweeping level ", sw.level, " at ", rec->pos));
            if (sw.track) sw.visited.insert(rec->pos);
        }
        out_.teams_emitted.push_back(out_.teams_emitted.back() + new_teams);
        sample(after);
    }

    /// Post-run checks over the whole record; call once after the run.
    void finish() {
        if (last_fresh_ && *last_fresh_ < last_round_) out_.t0 = *last_fresh_ + 1;
        // s_d - s_d' >= d - d' for d >= d' is monotonicity of s_d - d.
        std::optional<std::pair<std::int64_t, std::int64_t>> prev;
        for (const auto& [d, s] : out_.start) {
            const auto key = static_cast<std::int64_t>(s) - d;
            if (prev && key < prev->second)
                log_.add(s, "start-gap",
                         detail::cat("s_", d, " = ", s, " too early after level ", prev->first));
            if (!prev || key >= prev->second) prev = {d, key};
        }
    }

private:
    struct Sweep {
        std::int64_t level;
        bool track;
        std::unordered_set<Coord, CoordHash> visited;
    };

    void begin_sweep(std::int64_t d, std::uint64_t round, AgentId id) {
        if (!out_.start.emplace(d, round).second)
            log_.add(round, "duplicate-start", detail::cat("level ", d, " started twice"));
        Sweep sw{d, d <= coverage_limit_, {}};
        if (sw.track) sw.visited = {{0, d}, {-1, d}};
        sweeps_[id] = std::move(sw);
    }

    void end_sweep(std::int64_t d, std::uint64_t round, AgentId id) {
        if (!out_.finish.emplace(d, round).second)
            log_.add(round, "duplicate-finish", detail::cat("level ", d, " finished twice"));
        auto s = out_.start.find(d);
        if (s == out_.start.end()) {
            log_.add(round, "sweep-time", detail::cat("level ", d, " finished without a start"));
        } else if (round - s->second != static_cast<std::uint64_t>(8 * d)) {
            log_.add(round, "sweep-time",
                     detail::cat("f_", d, " - s_", d, " = ", round - s->second, ", expected ", 8 * d));
        }
        auto it = sweeps_.find(id);
        if (it == sweeps_.end() || it->second.level != d) return;
        if (it->second.track) {
            for (const auto& c : diamond_cells(d)) {
                if (!it->second.visited.contains(c)) {
                    out_.coverage_failures.push_back(d);
                    log_.add(round, "coverage", detail::cat("level ", d, " sweep missed ", c));
                    break;
                }
            }
        }
        sweeps_.erase(it);
    }

    void sample(const AntWorld& w) {
        if (out_.teams_emitted.empty()) out_.teams_emitted.push_back(0);
        ExploringCount c;
        for (const auto& a : w.agents) {
            if (holds<Explorer>(a.state)) {
                ++c.explorers;
                explored_.insert(a.pos);
            } else if (holds<MovingExplorer>(a.state)) {
                ++c.moving;
            } else if (holds<FreshExplorer>(a.state)) {
                ++c.fresh;
            }
        }
        if (c.fresh > 0) last_fresh_ = w.round;
        last_round_ = w.round;
        out_.exploring.push_back(c);
        out_.cells_explored.push_back(explored_.size());
    }

    LevelMetrics& out_;
    ViolationLog& log_;
    std::int64_t coverage_limit_;
    std::unordered_map<AgentId, Sweep> sweeps_;
    std::unordered_set<Coord, CoordHash> explored_;
    std::optional<std::uint64_t> last_fresh_;
    std::uint64_t last_round_ = 0;
};

// ---- invariant checker ------------------------------------------------------

/// Per-round structural rules of RectSearch and PSTA. Violations name the
/// round, the rule and the offending cells or agents.
class InvariantChecker : public AntObserver {
public:
    InvariantChecker(ViolationLog& log, bool psta) : log_(log), psta_(psta) {}

    void on_start(const AntWorld& w) override { check_world(w); }

    void on_step(const AntWorld& before, const AntWorld& after) override {
        check_world(after);
        check_emission(before, after);
        if (psta_) check_psta(before, after);
    }

private:
    void check_world(const AntWorld& w) {
        exclusion(w);
        contiguity(w);
        spacing(w);
        if (psta_) flag_unique(w);
    }

    void exclusion(const AntWorld& w) {
        std::vector<std::pair<Coord, std::size_t>> occ;
        for (const auto& a : w.agents)
            if (is_rect_type(a.state) && a.pos != origin) occ.emplace_back(a.pos, a.state.index());
        std::sort(occ.begin(), occ.end());
        for (std::size_t i = 1; i < occ.size(); ++i)
            if (occ[i] == occ[i - 1])
                log_.add(w.round, "same-type",
                         detail::cat("two ", tag_names[occ[i].second], " agents at ", occ[i].first));
    }

    /// Stationary and moving guides of one direction sit on their own axis
    /// ray and fill a gap-free run of cells.
    void contiguity(const AntWorld& w) {
        std::vector<std::int64_t> ray[4];
        for (const auto& a : w.agents) {
            std::optional<Dir> dir;
            if (const auto* g = std::get_if<Guide>(&a.state)) dir = g->dir;
            else if (const auto* m = std::get_if<MovingGuide>(&a.state)) dir = m->dir;
            if (!dir) continue;
            const Coord p = a.pos;
            std::int64_t along = 0;
            bool on_axis = false;
            switch (*dir) {
                case Dir::N: on_axis = p.x == 0 && p.y > 0; along = p.y; break;
                case Dir::S: on_axis = p.x == 0 && p.y < 0; along = -p.y; break;
                case Dir::E: on_axis = p.y == 0 && p.x > 0; along = p.x; break;
                case Dir::W: on_axis = p.y == 0 && p.x < 0; along = -p.x; break;
            }
            if (!on_axis) {
                log_.add(w.round, "guide-axis", detail::cat(dir_name(*dir), " guide ", a.id, " off its ray at ", p));
                continue;
            }
            ray[static_cast<int>(*dir)].push_back(along);
        }
        for (int d = 0; d < 4; ++d) {
            auto& r = ray[d];
            if (r.empty()) continue;
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end()), r.end());
            if (r.back() - r.front() + 1 != static_cast<std::int64_t>(r.size()))
                log_.add(w.round, "guide-contiguity",
                         detail::cat(dir_name(static_cast<Dir>(d)), " guides span ", r.front(), "..", r.back(),
                                     " with ", r.size(), " cells"));
        }
    }

    void spacing(const AntWorld& w) {
        std::vector<const AgentRecord<AgentState>*> m;
        for (const auto& a : w.agents)
            if (holds<MovingExplorer>(a.state)) m.push_back(&a);
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i + 1; j < m.size(); ++j)
                if (l1_distance(m[i]->pos, m[j]->pos) < 8)
                    log_.add(w.round, "mexplorer-spacing",
                             detail::cat("moving explorers ", m[i]->id, " at ", m[i]->pos, " and ", m[j]->id,
                                         " at ", m[j]->pos));
    }

    void flag_unique(const AntWorld& w) {
        std::size_t holders = 0;
        for (const auto& a : w.agents) {
            const auto* r = std::get_if<Ready>(&a.state);
            if ((r != nullptr && r->flag) || holds<Collector>(a.state) || holds<FlagTrip>(a.state)) ++holders;
        }
        if (holders > 1) log_.add(w.round, "flag-unique", detail::cat(holders, " innermost-flag holders"));
    }

    /// Agents that turned fresh this round must form at most one full team.
    void check_emission(const AntWorld& before, const AntWorld& after) {
        int roles[5] = {};
        std::size_t fresh = 0;
        for (std::size_t i = 0; i < after.agents.size(); ++i) {
            const auto& b = after.agents[i].state;
            if (!detail::is_fresh(b) || detail::is_fresh(before.agents[i].state)) continue;
            ++fresh;
            if (holds<FreshExplorer>(b)) ++roles[0];
            else ++roles[1 + static_cast<int>(std::get<FreshGuide>(b).dir)];
            if (after.agents[i].pos != origin)
                log_.add(after.round, "team-integrity",
                         detail::cat("agent ", after.agents[i].id, " turned fresh off the origin"));
        }
        if (fresh == 0) return;
        if (fresh > 5) {
            log_.add(after.round, "distinct-emission", detail::cat(fresh, " fresh agents in one round"));
            return;
        }
        if (fresh != 5 || std::any_of(std::begin(roles), std::end(roles), [](int c) { return c != 1; }))
            log_.add(after.round, "team-integrity", detail::cat("team of ", fresh, " without five distinct roles"));
    }

    void check_psta(const AntWorld& before, const AntWorld& after) {
        std::set<std::int64_t> held;
        for (std::size_t i = 0; i < after.agents.size(); ++i) {
            const auto& a = before.agents[i];
            const auto& b = after.agents[i];
            const bool on_ray = b.pos.y == 0 && b.pos.x >= 1;
            if (const auto* r = std::get_if<Ready>(&b.state); r != nullptr && !holds<Ready>(a.state)) {
                if (!on_ray || r->role != emission::role_of(static_cast<int>(b.pos.x % 5)))
                    log_.add(after.round, "mod5",
                             detail::cat("agent ", b.id, " elected ", role_name(r->role), " at ", b.pos));
                if (auto it = ray_.find(b.pos.x); on_ray && it != ray_.end() && it->second == RayCell::Collected)
                    log_.add(after.round, "re-election",
                             detail::cat("agent ", b.id, " elected in collected cell ", b.pos));
            }
            if (holds<Ready>(a.state) && (holds<Collector>(b.state) || holds<CollectedGuide>(b.state)))
                ray_[a.pos.x] = RayCell::Collected;
            if (on_ray && (holds<Elector>(b.state) || holds<Ready>(b.state))) held.insert(b.pos.x);
        }
        for (auto x : held) ray_.try_emplace(x, RayCell::Active);
        for (const auto& [x, st] : ray_)
            if (st == RayCell::Active && !held.contains(x))
                log_.add(after.round, "ray-never-empty", detail::cat("ray cell ", x, " emptied before collection"));
    }

    enum class RayCell : std::uint8_t { Active, Collected };

    ViolationLog& log_;
    bool psta_;
    std::map<std::int64_t, RayCell> ray_;
};

// ---- emission tracker ---------------------------------------------------------

/// Team emission rounds and the first round each ray cell was Ready.
class EmissionTracker : public AntObserver {
public:
    explicit EmissionTracker(EmissionMetrics& out) : out_(out) {}

    void on_step(const AntWorld& before, const AntWorld& after) override {
        for (std::size_t i = 0; i < after.agents.size(); ++i) {
            const auto& b = after.agents[i];
            if (holds<FreshExplorer>(b.state) && !holds<FreshExplorer>(before.agents[i].state))
                out_.team_rounds.push_back(after.round);
            if (holds<Ready>(b.state) && b.pos.y == 0 && b.pos.x >= 1)
                out_.first_ready.try_emplace(b.pos.x, after.round);
        }
    }

private:
    EmissionMetrics& out_;
};

// ---- first-visit watcher ------------------------------------------------------

/// First round at which some agent stood on each target cell. Controllers
/// never branch on the treasure, so one run yields the discovery round of
/// every placement among the targets.
class FirstVisitWatcher : public AntObserver {
public:
    explicit FirstVisitWatcher(const std::vector<Coord>& targets) {
        for (const auto& c : targets) first_.emplace(c, std::nullopt);
        remaining_ = first_.size();
    }

    void on_start(const AntWorld& w) override { scan(w); }
    void on_step(const AntWorld&, const AntWorld& after) override { scan(after); }
    bool wants_stop() const override { return remaining_ == 0; }

    /// Latest first visit over all targets and where it happened, or nullopt
    /// while some target is unvisited.
    std::optional<std::pair<std::uint64_t, Coord>> worst() const {
        if (remaining_ != 0 || first_.empty()) return std::nullopt;
        std::pair<std::uint64_t, Coord> out{0, first_.begin()->first};
        bool set = false;
        for (const auto& [c, r] : first_)
            if (!set || *r > out.first || (*r == out.first && c < out.second)) {
                out = {*r, c};
                set = true;
            }
        return out;
    }

    std::optional<std::uint64_t> first_visit(const Coord& c) const {
        auto it = first_.find(c);
        return it == first_.end() ? std::nullopt : it->second;
    }

private:
    void scan(const AntWorld& w) {
        if (remaining_ == 0) return;
        for (const auto& a : w.agents) {
            auto it = first_.find(a.pos);
            if (it != first_.end() && !it->second) {
                it->second = w.round;
                --remaining_;
            }
        }
    }

    std::unordered_map<Coord, std::optional<std::uint64_t>, CoordHash> first_;
    std::size_t remaining_ = 0;
};

// ---- trace writer -------------------------------------------------------------

/// One JSON line per sampled round: {"round": r, "agents": [[id, tag, x, y], ...]}.
class TraceWriter : public AntObserver {
public:
    TraceWriter(const std::string& path, std::uint64_t stride) : out_(path), stride_(stride) {
        if (!out_) throw UsageError("cannot open trace file " + path);
    }

    void on_start(const AntWorld& w) override { write(w); }
    void on_step(const AntWorld&, const AntWorld& after) override {
        if (after.round % stride_ == 0) write(after);
    }

private:
    void write(const AntWorld& w) {
        nlohmann::json agents = nlohmann::json::array();
        for (const auto& a : w.agents) agents.push_back({a.id, tag_name(a.state), a.pos.x, a.pos.y});
        out_ << nlohmann::json{{"round", w.round}, {"agents", std::move(agents)}}.dump() << '\n';
    }

    std::ofstream out_;
    std::uint64_t stride_;
};

}  // namespace antsim::harness
