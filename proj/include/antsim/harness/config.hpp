#pragma once

// Run configuration. Everything here is harness-side: controllers never see
// n, D or the treasure.

#include "antsim/engine.hpp"
#include "antsim/grid.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace antsim::harness {

enum class Strategy : std::uint8_t { RectOracle, RectPsta, Geom, Hybrid };

inline constexpr std::string_view strategy_name(Strategy s) noexcept {
    switch (s) {
        case Strategy::RectOracle: return "rect-oracle";
        case Strategy::RectPsta: return "rect-psta";
        case Strategy::Geom: return "geom";
        case Strategy::Hybrid: return "hybrid";
    }
    return "?";
}

inline Strategy parse_strategy(std::string_view name) {
    for (auto s : {Strategy::RectOracle, Strategy::RectPsta, Strategy::Geom, Strategy::Hybrid})
        if (strategy_name(s) == name) return s;
    throw UsageError("unknown strategy '" + std::string(name) + "'");
}

inline constexpr bool is_rect(Strategy s) noexcept {
    return s == Strategy::RectOracle || s == Strategy::RectPsta;
}
inline constexpr bool uses_psta(Strategy s) noexcept {
    return s == Strategy::RectPsta || s == Strategy::Hybrid;
}

namespace treasure {
/// No treasure: the run lasts max_rounds.
struct None {};
struct Explicit {
    Coord at;
};
/// i-th cell of level D, counterclockwise from (D, 0).
struct OnLevel {
    std::int64_t distance = 0;
    std::int64_t index = 0;
};
/// Latest discovery over all 4D placements on level D.
struct WorstOfLevel {
    std::int64_t distance = 0;
};
struct RandomOnLevel {
    std::int64_t distance = 0;
};
}  // namespace treasure

using TreasureSpec = std::variant<treasure::None, treasure::Explicit, treasure::OnLevel,
                                  treasure::WorstOfLevel, treasure::RandomOnLevel>;

/// D of a placement, or nullopt without a treasure.
inline std::optional<std::int64_t> treasure_distance(const TreasureSpec& t) {
    return std::visit(
        [](const auto& v) -> std::optional<std::int64_t> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, treasure::None>) return std::nullopt;
            else if constexpr (std::is_same_v<T, treasure::Explicit>) return l1_norm(v.at);
            else return v.distance;
        },
        t);
}

struct TraceSpec {
    std::string path;
    std::uint64_t stride = 1;
};

struct RunConfig {
    std::size_t n = 5;
    Strategy strategy = Strategy::RectOracle;
    TreasureSpec treasure = treasure::None{};
    std::uint64_t seed = 1;
    std::uint64_t max_rounds = 1000;
    std::optional<TraceSpec> trace;
    std::string metrics_out;
    bool assert_invariants = true;
    unsigned threads = 1;
    /// Evaluate agents in a seed-derived shuffled order; must not change results.
    bool shuffle = false;
    std::uint64_t run_id = 0;
};

inline void validate(const RunConfig& cfg) {
    if (cfg.n < 1) throw UsageError("n must be at least 1");
    if (is_rect(cfg.strategy) && cfg.n < 5)
        throw UsageError(std::string(strategy_name(cfg.strategy)) + " needs n >= 5 (one team)");
    if (auto d = treasure_distance(cfg.treasure); d && *d < 0)
        throw UsageError("treasure distance must be non-negative");
    if (const auto* on = std::get_if<treasure::OnLevel>(&cfg.treasure)) {
        const auto cells = on->distance == 0 ? 1 : 4 * on->distance;
        if (on->index < 0 || on->index >= cells)
            throw UsageError("on-level index " + std::to_string(on->index) + " outside level " +
                             std::to_string(on->distance));
    }
    if (cfg.trace && cfg.trace->stride == 0) throw UsageError("trace stride must be positive");
    if (cfg.threads == 0) throw UsageError("threads must be positive");
}

/// Default seed: ANTSIM_SEED when set, else 1.
inline std::uint64_t default_seed() {
    const char* env = std::getenv("ANTSIM_SEED");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 0);
    if (*end != '\0') throw UsageError(std::string("ANTSIM_SEED is not an integer: ") + env);
    return v;
}

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json to_json(const TreasureSpec& t) {
    using nlohmann::json;
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, treasure::None>) return {{"kind", "none"}};
            else if constexpr (std::is_same_v<T, treasure::Explicit>)
                return {{"kind", "explicit"}, {"x", v.at.x}, {"y", v.at.y}};
            else if constexpr (std::is_same_v<T, treasure::OnLevel>)
                return {{"kind", "on-level"}, {"D", v.distance}, {"index", v.index}};
            else if constexpr (std::is_same_v<T, treasure::WorstOfLevel>)
                return {{"kind", "worst-of-level"}, {"D", v.distance}};
            else return {{"kind", "random-on-level"}, {"D", v.distance}};
        },
        t);
}

inline TreasureSpec treasure_from_json(const nlohmann::json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "none") return treasure::None{};
    if (kind == "explicit") return treasure::Explicit{{j.at("x").get<std::int64_t>(), j.at("y").get<std::int64_t>()}};
    if (kind == "on-level") return treasure::OnLevel{j.at("D").get<std::int64_t>(), j.value("index", std::int64_t{0})};
    if (kind == "worst-of-level") return treasure::WorstOfLevel{j.at("D").get<std::int64_t>()};
    if (kind == "random-on-level") return treasure::RandomOnLevel{j.at("D").get<std::int64_t>()};
    throw UsageError("unknown treasure kind '" + kind + "'");
}

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j = {{"n", c.n},
                        {"strategy", strategy_name(c.strategy)},
                        {"treasure", to_json(c.treasure)},
                        {"seed", c.seed},
                        {"max_rounds", c.max_rounds},
                        {"metrics_out", c.metrics_out},
                        {"assert_invariants", c.assert_invariants},
                        {"threads", c.threads},
                        {"shuffle", c.shuffle}};
    if (c.trace) j["trace"] = {{"path", c.trace->path}, {"stride", c.trace->stride}};
    return j;
}

/// Fields missing from `j` keep the values in `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
    try {
        if (j.contains("n")) base.n = j["n"].get<std::size_t>();
        if (j.contains("strategy")) base.strategy = parse_strategy(j["strategy"].get<std::string>());
        if (j.contains("treasure")) base.treasure = treasure_from_json(j["treasure"]);
        if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("max_rounds")) base.max_rounds = j["max_rounds"].get<std::uint64_t>();
        if (j.contains("metrics_out")) base.metrics_out = j["metrics_out"].get<std::string>();
        if (j.contains("assert_invariants")) base.assert_invariants = j["assert_invariants"].get<bool>();
        if (j.contains("threads")) base.threads = j["threads"].get<unsigned>();
        if (j.contains("shuffle")) base.shuffle = j["shuffle"].get<bool>();
        if (j.contains("trace") && !j["trace"].is_null())
            base.trace = TraceSpec{j["trace"].at("path").get<std::string>(), j["trace"].value("stride", std::uint64_t{1})};
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("bad config: ") + e.what());
    }
    return base;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

}  // namespace antsim::harness
