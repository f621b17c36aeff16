#pragma once

#include "antsim/emission.hpp"
#include "antsim/engine.hpp"
#include "antsim/geom_search.hpp"
#include "antsim/harness/config.hpp"
#include "antsim/harness/metrics.hpp"
#include "antsim/harness/observers.hpp"
#include "antsim/hybrid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

namespace antsim::harness {

inline AgentState initial_state(Strategy s) {
    switch (s) {
        case Strategy::RectOracle: return Idle{};
        case Strategy::RectPsta: return emission::initial_elector();
        case Strategy::Geom: return GInit{};
        case Strategy::Hybrid: return HInit{};
    }
    return Idle{};
}

/// i-th cell of level d, counterclockwise from (d, 0).
inline Coord on_level(std::int64_t d, std::int64_t i) {
    if (d < 0) throw UsageError("on_level: negative distance");
    if (d == 0) {
        if (i != 0) throw UsageError("on_level: level 0 has a single cell");
        return origin;
    }
    if (i < 0 || i >= 4 * d)
        throw UsageError("on_level: index " + std::to_string(i) + " outside level " + std::to_string(d));
    const std::int64_t r = i % d;
    switch (i / d) {
        case 0: return {d - r, r};
        case 1: return {-r, d - r};
        case 2: return {-d + r, -r};
        default: return {r, -d + r};
    }
}

/// Key under which the random placement is drawn; no agent uses it.
inline constexpr AgentId placement_stream = 0xFFFFFFFFu;

/// Treasure cell for every placement except WorstOfLevel, which only
/// run_experiment can resolve.
inline std::optional<Coord> place_treasure(const RunConfig& cfg, const KeyedRng& rng) {
    return std::visit(
        [&](const auto& v) -> std::optional<Coord> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, treasure::None>) return std::nullopt;
            else if constexpr (std::is_same_v<T, treasure::Explicit>) return v.at;
            else if constexpr (std::is_same_v<T, treasure::OnLevel>) return on_level(v.distance, v.index);
            else if constexpr (std::is_same_v<T, treasure::RandomOnLevel>) {
                if (v.distance == 0) return origin;
                const auto cells = static_cast<std::uint64_t>(4 * v.distance);
                return on_level(v.distance, static_cast<std::int64_t>(rng.index(placement_stream, 0, cells)));
            } else {
                throw UsageError("worst-of-level placement is resolved by run_experiment");
            }
        },
        cfg.treasure);
}

/// Seed-derived evaluation order used when cfg.shuffle is set.
inline std::vector<std::size_t> shuffled_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(order.begin(), order.end(), gen);
    return order;
}

inline RunMetrics run_experiment(const RunConfig& cfg) {
    validate(cfg);
    const KeyedRng rng(cfg.seed);
    RunMetrics m;
    m.run_id = cfg.run_id;
    m.seed = cfg.seed;
    m.n = cfg.n;
    m.strategy = cfg.strategy;
    m.distance = treasure_distance(cfg.treasure);

    std::optional<Coord> treasure;
    std::unique_ptr<FirstVisitWatcher> watcher;
    if (const auto* worst = std::get_if<treasure::WorstOfLevel>(&cfg.treasure)) {
        if (worst->distance == 0) treasure = origin;
        else watcher = std::make_unique<FirstVisitWatcher>(diamond_cells(worst->distance));
    } else {
        treasure = place_treasure(cfg, rng);
    }
    m.treasure = treasure;

    ViolationLog log(m.violations);
    LevelRecorder recorder(m.levels, log);
    EmissionTracker emissions(m.emission);
    std::optional<InvariantChecker> checker;
    std::optional<TraceWriter> trace;
    std::vector<AntObserver*> observers{&recorder, &emissions};
    if (cfg.assert_invariants) observers.push_back(&checker.emplace(log, uses_psta(cfg.strategy)));
    if (watcher) observers.push_back(watcher.get());
    if (cfg.trace) observers.push_back(&trace.emplace(cfg.trace->path, cfg.trace->stride));

    BarrierHook<AgentState> barrier;
    if (cfg.strategy == Strategy::RectOracle) barrier = emission::OracleEmission{};

    std::vector<std::size_t> order;
    if (cfg.shuffle) order = shuffled_order(cfg.n, cfg.seed);
    const StepOptions opt{cfg.threads, order};

    auto world = init_world<AgentState>(cfg.n, initial_state(cfg.strategy), treasure);
    auto result = run(std::move(world), AntsController{}, rng, cfg.max_rounds,
                      std::span<AntObserver* const>(observers), barrier, opt);
    recorder.finish();

    m.rounds_simulated = result.final_world.round;
    if (watcher) {
        if (auto w = watcher->worst()) {
            m.discovery_round = w->first;
            m.treasure = w->second;
        }
    } else {
        m.discovery_round = result.discovery_round;
    }
    if (cfg.strategy == Strategy::Hybrid && result.final_world.round >= 1) {
        std::size_t r = 0, g = 0;
        for (const auto& a : result.final_world.agents) {
            if (family_of(a.state) == Family::Rect) ++r;
            else if (family_of(a.state) == Family::Geom) ++g;
        }
        m.n_r = r;
        m.n_g = g;
    }
    return m;
}

// ---- batch ------------------------------------------------------------------

struct BatchEntry {
    RunConfig config;
    std::optional<RunMetrics> metrics;
    std::string error;
};

/// Runs every (config, seed) pair, `jobs` at a time. Entries come back in
/// grid-major, seed-minor order whatever the parallelism; a failing run is
/// reported in its entry and does not stop the others.
inline std::vector<BatchEntry> batch(const std::vector<RunConfig>& grid, const std::vector<std::uint64_t>& seeds,
                                     unsigned jobs = 1) {
    std::vector<BatchEntry> entries;
    for (const auto& base : grid) {
        for (auto seed : seeds) {
            RunConfig c = base;
            c.seed = seed;
            c.run_id = entries.size();
            if (c.trace) c.trace->path += "." + std::to_string(c.run_id);
            entries.push_back({c, std::nullopt, {}});
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            try {
                entries[i].metrics = run_experiment(entries[i].config);
            } catch (const std::exception& e) {
                entries[i].error = e.what();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(entries.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return entries;
}

inline void write_csv(std::ostream& os, const std::vector<BatchEntry>& entries) {
    os << csv_header << '\n';
    for (const auto& e : entries)
        if (e.metrics) os << csv_row(*e.metrics) << '\n';
}

// ---- scaling ------------------------------------------------------------------

struct ScalingRow {
    std::size_t n = 0;
    std::int64_t distance = 0;
    Strategy strategy = Strategy::RectOracle;
    double discovery = 0;
    double bound = 0;
    double ratio = 0;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    /// Per n: smallest and largest ratio across D.
    std::map<std::size_t, std::pair<double, double>> spread;
    /// Least-squares c in discovery ~ c * bound.
    double fitted = 0;
    double min_ratio = 0;
    double max_ratio = 0;
};

/// D + D^2/n, plus log2 n under PSTA emission.
inline double scaling_bound(Strategy s, std::size_t n, std::int64_t d) {
    const double dd = static_cast<double>(d);
    double b = dd + dd * dd / static_cast<double>(n);
    if (s == Strategy::RectPsta) b += std::log2(static_cast<double>(n));
    return b;
}

/// Ratio of each discovered run to its bound. Rows without a discovery or
/// with D < 1 are skipped.
inline ScalingReport scaling_report(const std::vector<RunMetrics>& runs) {
    ScalingReport rep;
    double num = 0, den = 0;
    for (const auto& m : runs) {
        if (!m.discovery_round || !m.distance || *m.distance < 1) continue;
        if (!is_rect(m.strategy)) throw UsageError("scaling_report expects rect-oracle or rect-psta rows");
        ScalingRow r{m.n, *m.distance, m.strategy, static_cast<double>(*m.discovery_round), 0, 0};
        r.bound = scaling_bound(m.strategy, m.n, r.distance);
        r.ratio = r.discovery / r.bound;
        num += r.discovery * r.bound;
        den += r.bound * r.bound;
        auto [it, fresh] = rep.spread.try_emplace(r.n, r.ratio, r.ratio);
        if (!fresh) {
            it->second.first = std::min(it->second.first, r.ratio);
            it->second.second = std::max(it->second.second, r.ratio);
        }
        rep.min_ratio = rep.rows.empty() ? r.ratio : std::min(rep.min_ratio, r.ratio);
        rep.max_ratio = rep.rows.empty() ? r.ratio : std::max(rep.max_ratio, r.ratio);
        rep.rows.push_back(r);
    }
    if (den > 0) rep.fitted = num / den;
    return rep;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw UsageError("median of an empty sample");
    std::sort(v.begin(), v.end());
    const auto k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// ---- walk-length law ------------------------------------------------------------

inline constexpr std::int64_t pmf_cutoff = 30;
inline constexpr std::size_t pmf_min_samples = 100000;

/// Total-variation distance between the empirical law of `samples` and
/// walk_length_pmf over 0..30, with everything above pooled into one bin.
inline double pmf_test(const std::vector<std::int64_t>& samples) {
    if (samples.size() < pmf_min_samples)
        throw UsageError("pmf_test needs at least " + std::to_string(pmf_min_samples) + " samples");
    std::vector<double> emp(pmf_cutoff + 2, 0.0);
    for (auto k : samples) {
        if (k < 0) throw UsageError("pmf_test: negative walk length");
        ++emp[static_cast<std::size_t>(std::min(k, pmf_cutoff + 1))];
    }
    double tv = 0, head = 0;
    for (std::int64_t k = 0; k <= pmf_cutoff; ++k) {
        const double ref = geom::walk_length_pmf(k);
        head += ref;
        tv += std::abs(emp[k] / samples.size() - ref);
    }
    tv += std::abs(emp[pmf_cutoff + 1] / samples.size() - (1.0 - head));
    return tv / 2;
}

// ---- invariant suite --------------------------------------------------------------

struct SuiteResult {
    std::size_t runs = 0;
    std::size_t errors = 0;
    /// Completed level sweeps over all runs.
    std::size_t levels_finished = 0;
    /// Levels <= 30 whose coverage was checked.
    std::size_t levels_covered = 0;
    std::map<std::string, std::size_t> by_rule;
    std::vector<std::string> samples;  // first few violations, for diagnostics

    std::size_t total() const {
        std::size_t t = errors;
        for (const auto& [_, c] : by_rule) t += c;
        return t;
    }
    std::size_t count(const std::string& rule) const {
        auto it = by_rule.find(rule);
        return it == by_rule.end() ? 0 : it->second;
    }
};

/// Every strategy x n x seed combination without a treasure, checked each
/// round by the invariant checker and the level recorder.
inline SuiteResult verify_suite(const std::vector<Strategy>& strategies, const std::vector<std::size_t>& ns,
                                const std::vector<std::uint64_t>& seeds, std::uint64_t rounds, unsigned jobs = 1) {
    std::vector<RunConfig> grid;
    for (auto s : strategies)
        for (auto n : ns) {
            RunConfig c;
            c.n = n;
            c.strategy = s;
            c.max_rounds = rounds;
            c.assert_invariants = true;
            grid.push_back(c);
        }
    SuiteResult out;
    for (const auto& e : batch(grid, seeds, jobs)) {
        ++out.runs;
        if (!e.metrics) {
            ++out.errors;
            if (out.samples.size() < 10) out.samples.push_back("run " + std::to_string(e.config.run_id) + ": " + e.error);
            continue;
        }
        const auto& lv = e.metrics->levels;
        out.levels_finished += lv.finish.size();
        for (const auto& [d, _] : lv.finish)
            if (d <= 30) ++out.levels_covered;
        for (const auto& v : e.metrics->violations) {
            ++out.by_rule[v.rule];
            if (out.samples.size() < 10) {
                std::ostringstream os;
                os << strategy_name(e.config.strategy) << " n=" << e.config.n << " seed=" << e.config.seed << ": " << v;
                out.samples.push_back(os.str());
            }
        }
    }
    return out;
}

}  // namespace antsim::harness
