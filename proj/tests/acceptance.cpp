// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include "antsim/harness/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

using namespace antsim;
using namespace antsim::harness;

namespace {

// Pinned thresholds.
constexpr std::uint64_t suite_seeds = 50;
constexpr std::uint64_t suite_rounds = 400;
constexpr double scaling_band = 2.0;  // max ratio / min ratio
constexpr std::size_t scaling_seeds = 10;
constexpr std::int64_t psta_s = 600;
constexpr double psta_k = 0.0;
constexpr double psta_c_prime = 1.0;
constexpr std::size_t psta_n = 1000;
constexpr std::uint64_t psta_runs = 100;
constexpr std::uint64_t psta_required = 95;
constexpr double max_tv = 0.01;
constexpr std::size_t tv_samples = 1000000;
constexpr std::uint64_t geom_runs = 100;
constexpr std::uint64_t geom_required = 99;
constexpr std::uint64_t split_runs = 200;
constexpr double split_required = 0.99;
constexpr std::uint64_t isolation_runs = 10;
constexpr std::uint64_t isolation_rounds = 1000;
constexpr std::uint64_t fraction_seeds = 20;
constexpr std::uint64_t fraction_rounds = 1500;

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::cout << id << (pass ? " PASS " : " FAIL ") << detail << std::endl;
    failures += !pass;
}

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
    std::vector<std::uint64_t> s(count);
    std::iota(s.begin(), s.end(), std::uint64_t{1});
    return s;
}

RunConfig config(std::size_t n, Strategy s, TreasureSpec t, std::uint64_t rounds, std::uint64_t seed = 1) {
    RunConfig c;
    c.n = n;
    c.strategy = s;
    c.treasure = t;
    c.max_rounds = rounds;
    c.seed = seed;
    return c;
}

std::string rules(const SuiteResult& r, std::initializer_list<const char*> names) {
    std::ostringstream os;
    for (const char* n : names) os << ' ' << n << '=' << r.count(n);
    return os.str();
}

void suite_criteria() {
    const auto r = verify_suite({Strategy::RectOracle, Strategy::RectPsta}, {5, 20, 100}, seed_range(suite_seeds),
                                suite_rounds);
    std::ostringstream base;
    base << r.runs << " runs, " << r.levels_finished << " completed sweeps, " << r.errors << " errors;";
    for (const auto& s : r.samples) std::cout << "  " << s << '\n';

    const std::size_t a1 = r.count("sweep-time") + r.count("duplicate-start") + r.count("duplicate-finish");
    report("A1", a1 == 0 && r.errors == 0 && r.levels_finished > 0,
           base.str() + rules(r, {"sweep-time", "duplicate-start", "duplicate-finish"}));
    report("A2", r.count("start-gap") == 0 && r.errors == 0 && r.levels_finished > 0,
           base.str() + rules(r, {"start-gap"}));

    const std::size_t a3 = r.total() - a1 - r.count("start-gap") - r.count("coverage") - r.errors;
    report("A3", a3 == 0 && r.errors == 0,
           base.str() + rules(r, {"same-type", "mexplorer-spacing", "guide-axis", "guide-contiguity", "sweep-band",
                                  "flag-unique", "distinct-emission", "team-integrity", "mod5", "re-election",
                                  "ray-never-empty"}));
    report("A4", r.count("coverage") == 0 && r.errors == 0 && r.levels_covered > 0,
           base.str() + " levels<=30 checked=" + std::to_string(r.levels_covered) + rules(r, {"coverage"}));
}

void scaling_criterion() {
    std::vector<RunConfig> grid;
    for (std::size_t n : {50u, 200u, 1000u})
        for (std::int64_t d : {20, 50, 100, 200})
            grid.push_back(config(n, Strategy::RectOracle, treasure::WorstOfLevel{d}, 1000000));
    const auto entries = batch(grid, seed_range(scaling_seeds));

    std::vector<RunMetrics> medians;
    bool complete = true;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> t;
        for (std::size_t s = 0; s < scaling_seeds; ++s) {
            const auto& e = entries[g * scaling_seeds + s];
            if (e.metrics && e.metrics->discovery_round) t.push_back(static_cast<double>(*e.metrics->discovery_round));
        }
        if (t.size() != scaling_seeds) {
            complete = false;
            continue;
        }
        RunMetrics m;
        m.n = grid[g].n;
        m.strategy = grid[g].strategy;
        m.distance = treasure_distance(grid[g].treasure);
        m.discovery_round = static_cast<std::uint64_t>(std::llround(median(t)));
        medians.push_back(m);
    }
    const auto rep = scaling_report(medians);
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    for (const auto& row : rep.rows)
        std::cout << "  n=" << row.n << " D=" << row.distance << " median discovery=" << static_cast<std::uint64_t>(row.discovery)
                  << " ratio=" << std::fixed << std::setprecision(3) << row.ratio << std::defaultfloat << '\n';
    for (const auto& [n, mm] : rep.spread)
        os << "n=" << n << " ratio in [" << mm.first << ", " << mm.second << "] (x" << mm.second / mm.first << "); ";
    const double band = rep.min_ratio > 0 ? rep.max_ratio / rep.min_ratio : INFINITY;
    os << "all ratios in [" << rep.min_ratio << ", " << rep.max_ratio << "], max/min " << band << " (limit "
       << scaling_band << "), fitted c " << rep.fitted;
    report("A5", complete && band <= scaling_band, os.str());
}

void emission_criterion() {
    const double logn = std::log2(static_cast<double>(psta_n));
    const std::int64_t cells = psta_s / 6;
    const double ready_bound = 2.0 * (psta_s + psta_k * logn);
    const double team_bound = psta_c_prime * (8.0 * psta_s + psta_k * logn);
    const std::uint64_t teams_needed = std::min<std::uint64_t>(psta_s, psta_n) / 5;

    const auto entries = batch({config(psta_n, Strategy::RectPsta, treasure::None{},
                                       static_cast<std::uint64_t>(team_bound))},
                               seed_range(psta_runs));
    std::uint64_t ok_a = 0, ok_b = 0, worst_ready = 0, worst_team = 0;
    for (const auto& e : entries) {
        if (!e.metrics) continue;
        const auto& em = e.metrics->emission;
        if (auto r = em.prefix_ready_round(cells); r && *r <= ready_bound) {
            ++ok_a;
            worst_ready = std::max(worst_ready, *r);
        }
        if (em.teams_by(static_cast<std::uint64_t>(team_bound)) >= teams_needed) {
            ++ok_b;
            worst_team = std::max(worst_team, em.team_rounds[teams_needed - 1]);
        }
    }
    std::ostringstream os;
    os << "n=" << psta_n << " s=" << psta_s << " k=" << psta_k << " c'=" << psta_c_prime << ": (a) first " << cells
       << " cells Ready within " << ready_bound << " rounds in " << ok_a << "/" << psta_runs << " seeds (latest "
       << worst_ready << "); (b) " << teams_needed << " teams by round " << team_bound << " in " << ok_b << "/"
       << psta_runs << " seeds (latest " << worst_team << ")";
    report("A6", ok_a >= psta_required && ok_b >= psta_required, os.str());
}

void geom_criterion() {
    const double tv = pmf_test(geom::sample_walk_lengths(KeyedRng(default_seed()), tv_samples));
    const std::int64_t d = 8;
    std::vector<RunConfig> grid{config(65536, Strategy::Geom, treasure::WorstOfLevel{d}, d + 2)};
    std::uint64_t ok = 0;
    for (const auto& e : batch(grid, seed_range(geom_runs)))
        ok += e.metrics && e.metrics->discovery_round && *e.metrics->discovery_round <= static_cast<std::uint64_t>(d + 2);
    std::ostringstream os;
    os << "TV " << std::setprecision(5) << tv << " over " << tv_samples << " walks (limit " << max_tv
       << "); n=65536 worst-of-level D=" << d << " found within " << d + 2 << " rounds in " << ok << "/" << geom_runs
       << " seeds";
    report("A7", tv <= max_tv && ok >= geom_required, os.str());
}

World<AgentState> only(const World<AgentState>& w, Family f) {
    World<AgentState> out;
    out.round = w.round;
    out.treasure = w.treasure;
    for (const auto& a : w.agents)
        if (family_of(a.state) == f) out.agents.push_back(a);
    return out;
}

bool matches(const World<AgentState>& full, const World<AgentState>& part) {
    for (const auto& a : part.agents) {
        const auto* b = full.find(a.id);
        if (b == nullptr || b->state != a.state || b->pos != a.pos) return false;
    }
    return true;
}

void hybrid_criterion() {
    const std::size_t n = 100;
    const std::size_t third = (n + 2) / 3;
    std::uint64_t ok = 0;
    for (const auto& e : batch({config(n, Strategy::Hybrid, treasure::None{}, 1)}, seed_range(split_runs)))
        ok += e.metrics && e.metrics->n_r && *e.metrics->n_r >= third && *e.metrics->n_g >= third;

    std::uint64_t isolated = 0;
    for (std::uint64_t seed = 1; seed <= isolation_runs; ++seed) {
        const KeyedRng rng(seed);
        auto full = step(init_world<AgentState>(n, HInit{}), AntsController{}, rng);
        auto rect = only(full, Family::Rect);
        auto geo = only(full, Family::Geom);
        bool same = rect.agents.size() + geo.agents.size() == n;
        for (std::uint64_t r = 0; same && r < isolation_rounds; ++r) {
            full = step(full, AntsController{}, rng);
            rect = step(rect, AntsController{}, rng);
            geo = step(geo, AntsController{}, rng);
            same = matches(full, rect) && matches(full, geo);
        }
        isolated += same;
    }
    std::ostringstream os;
    os << "n=" << n << ": both groups >= " << third << " in " << ok << "/" << split_runs
       << " seeds; branch isolation bit-exact in " << isolated << "/" << isolation_runs << " seeds over "
       << isolation_rounds << " rounds";
    report("A8", ok >= std::ceil(split_required * split_runs) && isolated == isolation_runs, os.str());
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void determinism_criterion() {
    const auto dir = std::filesystem::temp_directory_path() / ("antsim_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const std::vector<RunConfig> cases{config(20, Strategy::RectOracle, treasure::OnLevel{9, 5}, 2000, 3),
                                       config(60, Strategy::RectPsta, treasure::RandomOnLevel{7}, 3000, 5),
                                       config(500, Strategy::Geom, treasure::None{}, 30, 7),
                                       config(100, Strategy::Hybrid, treasure::RandomOnLevel{6}, 3000, 11)};
    struct Variant {
        unsigned threads;
        bool shuffle;
    };
    const Variant variants[] = {{1, false}, {1, false}, {4, false}, {1, true}, {4, true}};
    std::size_t compared = 0, mismatches = 0;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        std::string csv0, trace0;
        for (std::size_t v = 0; v < std::size(variants); ++v) {
            RunConfig cfg = cases[c];
            cfg.threads = variants[v].threads;
            cfg.shuffle = variants[v].shuffle;
            const auto path = dir / ("case" + std::to_string(c) + "_" + std::to_string(v) + ".jsonl");
            cfg.trace = TraceSpec{path.string(), 1};
            const auto csv = csv_row(run_experiment(cfg));
            const auto trace = read_file(path);
            if (v == 0) {
                csv0 = csv;
                trace0 = trace;
                continue;
            }
            ++compared;
            if (csv != csv0 || trace != trace0 || trace.empty()) {
                ++mismatches;
                std::cout << "  case " << c << " variant " << v << " differs\n";
            }
        }
    }
    std::filesystem::remove_all(dir);
    report("A9", mismatches == 0,
           std::to_string(cases.size()) + " configs x repeat/threads 4/shuffle/shuffle+threads 4: " +
               std::to_string(compared - mismatches) + "/" + std::to_string(compared) +
               " identical CSV rows and traces");
}

void fraction_criterion() {
    std::uint64_t dips = 0, checked = 0, seeds_ok = 0;
    std::optional<double> lowest;
    for (const auto& e : batch({config(200, Strategy::RectOracle, treasure::None{}, fraction_rounds)},
                               seed_range(fraction_seeds))) {
        if (!e.metrics || !e.metrics->levels.t0) continue;
        const auto& lv = e.metrics->levels;
        bool clean = true;
        for (std::size_t r = *lv.t0 + 1; r < lv.exploring.size(); ++r) {
            const auto& x = lv.exploring[r];
            if (x.total() == 0) continue;
            ++checked;
            if (8ull * x.explorers < 7ull * x.total()) {
                ++dips;
                clean = false;
            }
        }
        if (auto f = lv.min_exploring_fraction(); f && (!lowest || *f < *lowest)) lowest = f;
        seeds_ok += clean;
    }
    std::ostringstream os;
    os << "n=200, " << fraction_seeds << " seeds: " << checked << " rounds after t0 checked, " << dips
       << " below 7/8, lowest fraction " << (lowest ? *lowest : 0.0);
    report("A10", dips == 0 && checked > 0 && seeds_ok == fraction_seeds, os.str());
}

template <class F>
void timed(std::initializer_list<const char*> ids, F&& f) {
    const auto t = std::chrono::steady_clock::now();
    try {
        f();
    } catch (const std::exception& e) {
        for (const char* id : ids) report(id, false, std::string("aborted: ") + e.what());
    }
    const auto s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    std::cout << "  (" << std::fixed << std::setprecision(1) << s << " s)" << std::defaultfloat << std::endl;
}

}  // namespace

int main() {
    timed({"A1", "A2", "A3", "A4"}, suite_criteria);
    timed({"A5"}, scaling_criterion);
    timed({"A6"}, emission_criterion);
    timed({"A7"}, geom_criterion);
    timed({"A8"}, hybrid_criterion);
    timed({"A9"}, determinism_criterion);
    timed({"A10"}, fraction_criterion);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
