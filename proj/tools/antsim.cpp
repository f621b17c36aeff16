// antsim: command-line driver for the ANTS simulator.
//
// Exit codes: 0 success, 1 invariant or assertion failure, 2 configuration error.

#include "antsim/harness/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

using namespace antsim;
using namespace antsim::harness;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invariant = 1;
constexpr int exit_config = 2;

struct RunFlags {
    std::string config_file;
    std::size_t n = 5;
    std::string strategy = "rect-oracle";
    std::optional<std::int64_t> distance;
    std::optional<std::int64_t> index;
    std::optional<std::int64_t> tx, ty;
    bool worst = false;
    bool random = false;
    std::optional<std::uint64_t> seed;
    std::uint64_t max_rounds = 100000;
    std::string trace;
    std::uint64_t trace_stride = 1;
    std::string metrics_out;
    bool no_invariants = false;
    unsigned threads = 1;
    bool shuffle = false;
};

void add_run_flags(CLI::App* app, RunFlags& f) {
    app->add_option("--config", f.config_file, "JSON file mirroring RunConfig; flags override it");
    app->add_option("--n", f.n, "number of agents");
    app->add_option("--strategy", f.strategy, "rect-oracle | rect-psta | geom | hybrid");
    app->add_option("--distance", f.distance, "treasure level D");
    app->add_option("--on-level-index", f.index, "treasure = i-th cell of level D, counterclockwise from (D,0)");
    app->add_option("--treasure-x", f.tx, "explicit treasure x");
    app->add_option("--treasure-y", f.ty, "explicit treasure y");
    app->add_flag("--worst-of-level", f.worst, "latest discovery over all placements on level D");
    app->add_flag("--random-on-level", f.random, "uniform placement on level D");
    app->add_option("--seed", f.seed, "seed (default: ANTSIM_SEED or 1)");
    app->add_option("--max-rounds", f.max_rounds, "round limit");
    app->add_option("--trace", f.trace, "JSONL trace output path");
    app->add_option("--trace-stride", f.trace_stride, "trace every k-th round");
    app->add_option("--metrics-out", f.metrics_out, "CSV output path");
    app->add_flag("--no-invariants", f.no_invariants, "skip the per-round invariant checker");
    app->add_option("--threads", f.threads, "controller evaluation threads");
    app->add_flag("--shuffle", f.shuffle, "evaluate agents in a shuffled order");
}

RunConfig build_config(const RunFlags& f, const CLI::App& app) {
    RunConfig c;
    c.seed = default_seed();
    if (!f.config_file.empty()) c = config_from_json(read_json_file(f.config_file), c);
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--n")) c.n = f.n;
    if (given("--strategy")) c.strategy = parse_strategy(f.strategy);
    if (f.seed) c.seed = *f.seed;
    if (given("--max-rounds") || f.config_file.empty()) c.max_rounds = f.max_rounds;
    if (!f.metrics_out.empty()) c.metrics_out = f.metrics_out;
    if (f.no_invariants) c.assert_invariants = false;
    if (given("--threads")) c.threads = f.threads;
    if (f.shuffle) c.shuffle = true;
    if (!f.trace.empty()) c.trace = TraceSpec{f.trace, f.trace_stride};

    if (f.tx || f.ty) {
        if (!f.tx || !f.ty) throw UsageError("--treasure-x and --treasure-y go together");
        c.treasure = treasure::Explicit{{*f.tx, *f.ty}};
    } else if (f.distance) {
        if (f.worst + f.random + static_cast<bool>(f.index) > 1)
            throw UsageError("choose one of --on-level-index, --worst-of-level, --random-on-level");
        if (f.worst) c.treasure = treasure::WorstOfLevel{*f.distance};
        else if (f.random) c.treasure = treasure::RandomOnLevel{*f.distance};
        else c.treasure = treasure::OnLevel{*f.distance, f.index.value_or(0)};
    } else if (f.worst || f.random || f.index) {
        throw UsageError("placement flags need --distance");
    }
    validate(c);
    return c;
}

void write_rows(const std::string& path, const std::vector<RunMetrics>& rows) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot open " + path);
    out << csv_header << '\n';
    for (const auto& m : rows) out << csv_row(m) << '\n';
}

void print_summary(const RunMetrics& m) {
    std::cout << "strategy " << strategy_name(m.strategy) << ", n=" << m.n << ", seed=" << m.seed << '\n';
    if (m.treasure) std::cout << "treasure " << *m.treasure << '\n';
    if (m.discovery_round) std::cout << "discovered at round " << *m.discovery_round << '\n';
    else std::cout << "not discovered\n";
    std::cout << "rounds simulated " << m.rounds_simulated << '\n';
    std::cout << "levels started " << m.levels.start.size() << ", finished " << m.levels.finish.size() << '\n';
    if (m.levels.t0) std::cout << "t0 " << *m.levels.t0 << '\n';
    std::cout << "teams emitted " << m.levels.teams_emitted.back() << '\n';
    if (m.n_r) std::cout << "hybrid split n_r=" << *m.n_r << " n_g=" << *m.n_g << '\n';
    std::cout << "violations " << m.violations.size() << '\n';
    for (std::size_t i = 0; i < m.violations.size() && i < 10; ++i) std::cout << "  " << m.violations[i] << '\n';
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> d) {
    return v.empty() ? d : v;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
    std::vector<std::uint64_t> s(count);
    std::iota(s.begin(), s.end(), first);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"antsim: finite-state ant colony treasure search simulator"};
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    add_run_flags(run_cmd, run_flags);

    std::string batch_file, batch_out;
    std::size_t batch_seeds = 10;
    std::uint64_t batch_first = 1;
    unsigned batch_jobs = 1;
    auto* batch_cmd = app.add_subcommand("batch", "run a grid of configs over several seeds");
    batch_cmd->add_option("--grid", batch_file, "JSON array of configs")->required();
    batch_cmd->add_option("--seeds", batch_seeds, "seeds per config");
    batch_cmd->add_option("--first-seed", batch_first, "first seed");
    batch_cmd->add_option("--jobs", batch_jobs, "parallel runs");
    batch_cmd->add_option("--out", batch_out, "CSV output path (default stdout)");

    std::size_t verify_seeds = 50;
    std::uint64_t verify_rounds = 400;
    std::vector<std::size_t> verify_ns;
    std::vector<std::string> verify_strategies;
    unsigned verify_jobs = 1;
    auto* verify_cmd = app.add_subcommand("verify", "invariant suite over strategies x n x seeds");
    verify_cmd->add_option("--seeds", verify_seeds, "seeds per cell");
    verify_cmd->add_option("--rounds", verify_rounds, "rounds per run");
    verify_cmd->add_option("--n", verify_ns, "agent counts (default 5 20 100)");
    verify_cmd->add_option("--strategy", verify_strategies, "strategies (default rect-oracle rect-psta)");
    verify_cmd->add_option("--jobs", verify_jobs, "parallel runs");

    std::size_t dist_samples = 1000000;
    std::optional<std::uint64_t> dist_seed;
    double dist_max_tv = 0.01;
    auto* dist_cmd = app.add_subcommand("dist", "total-variation test of the GeomSearch walk length");
    dist_cmd->add_option("--samples", dist_samples, "number of walks");
    dist_cmd->add_option("--seed", dist_seed, "seed (default: ANTSIM_SEED or 1)");
    dist_cmd->add_option("--max-tv", dist_max_tv, "pass threshold");

    std::vector<std::size_t> scaling_ns;
    std::vector<std::int64_t> scaling_ds;
    std::size_t scaling_seeds = 10;
    std::string scaling_strategy = "rect-oracle", scaling_out;
    std::uint64_t scaling_rounds = 2000000;
    unsigned scaling_jobs = 1;
    auto* scaling_cmd = app.add_subcommand("scaling", "worst-of-level sweep and D + D^2/n ratio report");
    scaling_cmd->add_option("--n", scaling_ns, "agent counts (default 50 200 1000)");
    scaling_cmd->add_option("--distance", scaling_ds, "levels (default 20 50 100 200)");
    scaling_cmd->add_option("--seeds", scaling_seeds, "seeds per cell");
    scaling_cmd->add_option("--strategy", scaling_strategy, "rect-oracle | rect-psta");
    scaling_cmd->add_option("--max-rounds", scaling_rounds, "round limit per run");
    scaling_cmd->add_option("--jobs", scaling_jobs, "parallel runs");
    scaling_cmd->add_option("--out", scaling_out, "CSV of the runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        if (*run_cmd) {
            const auto cfg = build_config(run_flags, *run_cmd);
            const auto m = run_experiment(cfg);
            print_summary(m);
            if (!cfg.metrics_out.empty()) write_rows(cfg.metrics_out, {m});
            return cfg.assert_invariants && !m.violations.empty() ? exit_invariant : exit_ok;
        }
        if (*batch_cmd) {
            const auto j = read_json_file(batch_file);
            if (!j.is_array()) throw UsageError("batch grid must be a JSON array");
            std::vector<RunConfig> grid;
            for (const auto& item : j) {
                grid.push_back(config_from_json(item));
                validate(grid.back());
            }
            const auto entries = batch(grid, seed_range(batch_first, batch_seeds), batch_jobs);
            if (batch_out.empty()) {
                write_csv(std::cout, entries);
            } else {
                std::ofstream out(batch_out);
                if (!out) throw UsageError("cannot open " + batch_out);
                write_csv(out, entries);
            }
            bool failed = false;
            for (const auto& e : entries) {
                if (!e.error.empty()) {
                    std::cerr << "run " << e.config.run_id << " failed: " << e.error << '\n';
                    failed = true;
                } else if (e.config.assert_invariants && !e.metrics->violations.empty()) {
                    failed = true;
                }
            }
            return failed ? exit_invariant : exit_ok;
        }
        if (*verify_cmd) {
            std::vector<Strategy> strategies;
            for (const auto& s : or_default(verify_strategies, {"rect-oracle", "rect-psta"}))
                strategies.push_back(parse_strategy(s));
            const auto ns = or_default(verify_ns, {5, 20, 100});
            for (auto n : ns)
                if (n < 5) throw UsageError("verify: rect strategies need n >= 5");
            const auto r = verify_suite(strategies, ns, seed_range(1, verify_seeds), verify_rounds, verify_jobs);
            std::cout << r.runs << " runs, " << r.levels_finished << " completed level sweeps, "
                      << r.levels_covered << " coverage checks\n";
            for (const auto& [rule, c] : r.by_rule) std::cout << "  " << rule << ": " << c << '\n';
            for (const auto& s : r.samples) std::cout << "  " << s << '\n';
            std::cout << (r.total() == 0 ? "clean\n" : "VIOLATIONS\n");
            return r.total() == 0 ? exit_ok : exit_invariant;
        }
        if (*dist_cmd) {
            const KeyedRng rng(dist_seed.value_or(default_seed()));
            const double tv = pmf_test(geom::sample_walk_lengths(rng, dist_samples));
            std::cout << "TV distance " << std::setprecision(6) << tv << " over " << dist_samples
                      << " walks (threshold " << dist_max_tv << ")\n";
            return tv <= dist_max_tv ? exit_ok : exit_invariant;
        }
        if (*scaling_cmd) {
            const auto strategy = parse_strategy(scaling_strategy);
            std::vector<RunConfig> grid;
            for (auto n : or_default(scaling_ns, {50, 200, 1000}))
                for (auto d : or_default(scaling_ds, {20, 50, 100, 200})) {
                    RunConfig c;
                    c.n = n;
                    c.strategy = strategy;
                    c.treasure = treasure::WorstOfLevel{d};
                    c.max_rounds = scaling_rounds;
                    c.assert_invariants = false;
                    validate(c);
                    grid.push_back(c);
                }
            const auto entries = batch(grid, seed_range(1, scaling_seeds), scaling_jobs);
            std::vector<RunMetrics> rows;
            for (const auto& e : entries) {
                if (!e.metrics) throw std::runtime_error(e.error);
                rows.push_back(*e.metrics);
            }
            if (!scaling_out.empty()) write_rows(scaling_out, rows);
            const auto rep = scaling_report(rows);
            std::cout << std::fixed << std::setprecision(3);
            std::cout << "n\tD\tdiscovery\tbound\tratio\n";
            for (const auto& r : rep.rows)
                std::cout << r.n << '\t' << r.distance << '\t' << r.discovery << '\t' << r.bound << '\t' << r.ratio
                          << '\n';
            for (const auto& [n, mm] : rep.spread)
                std::cout << "n=" << n << ": ratio in [" << mm.first << ", " << mm.second << "], max/min "
                          << mm.second / mm.first << '\n';
            std::cout << "fitted constant " << rep.fitted << ", overall max/min "
                      << (rep.min_ratio > 0 ? rep.max_ratio / rep.min_ratio : 0.0) << '\n';
            return exit_ok;
        }
    } catch (const UsageError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << '\n';
        return exit_invariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invariant;
    }
    return exit_ok;
}
