#pragma once

#include "antsim/grid.hpp"
#include "antsim/rng.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace antsim {

using AgentId = std::uint32_t;

/// Bad arguments or configuration supplied by the caller.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A controller returned an empty enabled set, or otherwise broke the model.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
concept Streamable = requires(std::ostream& os, const T& t) { os << t; };

template <class State>
std::string describe(const State& s) {
    if constexpr (Streamable<State>) {
        std::ostringstream os;
        os << s;
        return os.str();
    } else {
        return "<state>";
    }
}

}  // namespace detail

template <class State>
struct Transition {
    State state;
    Move move = Move::P;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Fixed-capacity set of (state, move) pairs produced by one controller call.
/// Inserting a pair that is already present is a no-op.
template <class State, std::size_t Capacity = 8>
class EnabledSet {
public:
    EnabledSet() = default;
    EnabledSet(std::initializer_list<Transition<State>> items) {
        for (const auto& t : items) insert(t);
    }

    void insert(const Transition<State>& t) {
        if (std::find(begin(), end(), t) != end()) return;
        if (size_ == Capacity) throw std::length_error("EnabledSet capacity exceeded");
        items_[size_++] = t;
    }
    void insert(State s, Move m) { insert(Transition<State>{std::move(s), m}); }

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }
    const Transition<State>& operator[](std::size_t i) const noexcept { return items_[i]; }
    const Transition<State>* begin() const noexcept { return items_.data(); }
    const Transition<State>* end() const noexcept { return items_.data() + size_; }

    bool contains(const Transition<State>& t) const {
        return std::find(begin(), end(), t) != end();
    }

private:
    std::array<Transition<State>, Capacity> items_{};
    std::size_t size_ = 0;
};

/// One distinct state present in a cell and the number of agents holding it.
template <class State>
struct CellEntry {
    State state;
    std::uint32_t count = 0;
};

/// What an agent perceives in a round: the set of states held by at least
/// one *other* agent in its cell, and whether it stands on the origin or on
/// the treasure. This is a non-owning view; it is only valid during the
/// controller call it is passed to.
template <class State>
class LocalInput {
public:
    /// Optional visibility filter: `other` is dropped from the sensed set
    /// when it returns false.
    using Filter = bool (*)(const State& self, const State& other);

    LocalInput(std::span<const CellEntry<State>> cell, const State& self, bool self_counted,
               bool at_origin, bool at_treasure, Filter filter = nullptr) noexcept
        : cell_(cell),
          self_(&self),
          self_counted_(self_counted),
          at_origin_(at_origin),
          at_treasure_(at_treasure),
          filter_(filter) {}

    bool at_origin() const noexcept { return at_origin_; }
    bool at_treasure() const noexcept { return at_treasure_; }

    template <class Pred>
    bool any(Pred&& pred) const {
        for (const auto& e : cell_)
            if (visible(e) && pred(e.state)) return true;
        return false;
    }

    bool contains(const State& q) const {
        return any([&](const State& s) { return s == q; });
    }

    bool empty() const {
        return !any([](const State&) { return true; });
    }

    std::vector<State> sensed() const {
        std::vector<State> out;
        for (const auto& e : cell_)
            if (visible(e)) out.push_back(e.state);
        return out;
    }

    LocalInput filtered(Filter f) const noexcept {
        LocalInput copy = *this;
        copy.filter_ = f;
        return copy;
    }

private:
    bool visible(const CellEntry<State>& e) const {
        const std::uint32_t own = (self_counted_ && e.state == *self_) ? 1u : 0u;
        if (e.count <= own) return false;
        return filter_ == nullptr || filter_(*self_, e.state);
    }

    std::span<const CellEntry<State>> cell_;
    const State* self_;
    bool self_counted_;
    bool at_origin_;
    bool at_treasure_;
    Filter filter_;
};

/// Owning snapshot of a local input; used by `local_input` and by tests that
/// feed controllers hand-built inputs.
template <class State>
class Sensing {
public:
    Sensing() = default;
    explicit Sensing(std::vector<State> sensed, bool at_origin = false, bool at_treasure = false)
        : at_origin_(at_origin), at_treasure_(at_treasure) {
        std::sort(sensed.begin(), sensed.end());
        sensed.erase(std::unique(sensed.begin(), sensed.end()), sensed.end());
        entries_.reserve(sensed.size());
        for (auto& s : sensed) entries_.push_back({std::move(s), 1});
    }

    std::vector<State> sensed() const {
        std::vector<State> out;
        for (const auto& e : entries_) out.push_back(e.state);
        return out;
    }
    bool at_origin() const noexcept { return at_origin_; }
    bool at_treasure() const noexcept { return at_treasure_; }

    LocalInput<State> view(const State& self) const noexcept {
        return LocalInput<State>(entries_, self, false, at_origin_, at_treasure_);
    }

private:
    std::vector<CellEntry<State>> entries_;
    bool at_origin_ = false;
    bool at_treasure_ = false;
};

template <class State>
struct AgentRecord {
    AgentId id = 0;
    State state{};
    Coord pos{};

    friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

template <class State>
struct World {
    std::uint64_t round = 0;
    std::vector<AgentRecord<State>> agents;
    std::optional<Coord> treasure;

    friend bool operator==(const World&, const World&) = default;

    const AgentRecord<State>* find(AgentId id) const noexcept {
        if (id < agents.size() && agents[id].id == id) return &agents[id];
        for (const auto& a : agents)
            if (a.id == id) return &a;
        return nullptr;
    }

    /// Occupied cells only; the grid itself is never materialized.
    std::map<Coord, std::vector<AgentId>> cell_index() const {
        std::map<Coord, std::vector<AgentId>> index;
        for (const auto& a : agents) index[a.pos].push_back(a.id);
        return index;
    }

    bool treasure_found() const noexcept {
        if (!treasure) return false;
        return std::any_of(agents.begin(), agents.end(),
                           [&](const auto& a) { return a.pos == *treasure; });
    }
};

template <class State>
World<State> init_world(std::size_t n, const State& s0, std::optional<Coord> treasure = std::nullopt) {
    if (n == 0) throw UsageError("init_world: agent count must be at least 1");
    World<State> w;
    w.treasure = treasure;
    w.agents.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        w.agents.push_back({static_cast<AgentId>(i), s0, origin});
    return w;
}

/// States held by agents other than `id` in id's cell, sorted and distinct.
template <class State>
std::vector<State> sense(const World<State>& w, AgentId id) {
    const auto* self = w.find(id);
    if (self == nullptr) throw UsageError("sense: unknown agent id " + std::to_string(id));
    std::vector<State> out;
    for (const auto& a : w.agents)
        if (a.id != id && a.pos == self->pos) out.push_back(a.state);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

template <class State>
Sensing<State> local_input(const World<State>& w, AgentId id) {
    const auto* self = w.find(id);
    if (self == nullptr) throw UsageError("local_input: unknown agent id " + std::to_string(id));
    return Sensing<State>(sense(w, id), self->pos == origin,
                          w.treasure.has_value() && self->pos == *w.treasure);
}

struct StepOptions {
    /// Worker threads used to evaluate controllers; results do not depend on it.
    unsigned threads = 1;
    /// Optional evaluation order (a permutation of agent indices).
    std::span<const std::size_t> order{};
};

namespace detail {

template <class State>
struct CellTable {
    std::vector<CellEntry<State>> entries;
    // per agent index: [begin, end) into entries
    std::vector<std::pair<std::uint32_t, std::uint32_t>> range;
};

template <class State>
CellTable<State> build_cells(const World<State>& w) {
    const std::size_t n = w.agents.size();
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        const auto& x = w.agents[a];
        const auto& y = w.agents[b];
        if (x.pos != y.pos) return x.pos < y.pos;
        return x.state < y.state;
    });
    CellTable<State> table;
    table.range.resize(n);
    std::size_t i = 0;
    while (i < n) {
        const Coord cell = w.agents[idx[i]].pos;
        const auto begin = static_cast<std::uint32_t>(table.entries.size());
        std::size_t j = i;
        while (j < n && w.agents[idx[j]].pos == cell) {
            const State& s = w.agents[idx[j]].state;
            if (table.entries.size() > begin && table.entries.back().state == s)
                ++table.entries.back().count;
            else
                table.entries.push_back({s, 1});
            ++j;
        }
        const auto end = static_cast<std::uint32_t>(table.entries.size());
        for (std::size_t k = i; k < j; ++k) table.range[idx[k]] = {begin, end};
        i = j;
    }
    return table;
}

}  // namespace detail

/// Draws one element of an enabled set uniformly, keyed by (agent, round).
template <class State, std::size_t C>
const Transition<State>& choose(const EnabledSet<State, C>& enabled, const KeyedRng& rng,
                                AgentId id, std::uint64_t round) {
    if (enabled.size() == 1) return enabled[0];
    return enabled[rng.index(id, round, enabled.size())];
}

/// One synchronous round: every agent's input is computed from the same
/// round-t snapshot, every agent draws its transition, and all state changes
/// and moves are applied together.
template <class State, class Controller>
World<State> step(const World<State>& w, const Controller& ctl, const KeyedRng& rng,
                  const StepOptions& opt = {}) {
    const std::size_t n = w.agents.size();
    const auto cells = detail::build_cells(w);

    World<State> next;
    next.round = w.round + 1;
    next.treasure = w.treasure;
    next.agents.resize(n);

    auto eval = [&](std::size_t i) {
        const auto& a = w.agents[i];
        const auto [b, e] = cells.range[i];
        const LocalInput<State> input(
            std::span<const CellEntry<State>>(cells.entries.data() + b, e - b), a.state, true,
            a.pos == origin, w.treasure.has_value() && a.pos == *w.treasure);
        const auto enabled = ctl(a.state, input);
        if (enabled.empty()) {
            std::ostringstream msg;
            msg << "empty enabled set at round " << w.round << " for agent " << a.id
                << " in state " << detail::describe(a.state) << " at " << a.pos
                << " (at_origin=" << input.at_origin() << ", sensed={";
            bool first = true;
            for (const auto& s : input.sensed()) {
                msg << (first ? "" : ", ") << detail::describe(s);
                first = false;
            }
            msg << "})";
            throw ProtocolError(msg.str());
        }
        const auto& t = choose(enabled, rng, a.id, w.round);
        next.agents[i] = {a.id, t.state, apply_move(a.pos, t.move)};
    };
    auto index_at = [&](std::size_t k) { return opt.order.empty() ? k : opt.order[k]; };

    const unsigned threads = std::max(1u, opt.threads);
    if (threads == 1 || n < 2 * threads) {
        for (std::size_t k = 0; k < n; ++k) eval(index_at(k));
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        pool.reserve(threads);
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    const std::size_t lo = t * chunk;
                    const std::size_t hi = std::min(n, lo + chunk);
                    for (std::size_t k = lo; k < hi; ++k) eval(index_at(k));
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }
    return next;
}

/// Read-only per-round hook.
template <class State>
class Observer {
public:
    virtual ~Observer() = default;
    virtual void on_start(const World<State>&) {}
    virtual void on_step(const World<State>& before, const World<State>& after) = 0;
    /// Lets an observer end the run early (e.g. once it has what it measures).
    virtual bool wants_stop() const { return false; }
};

/// Mutation applied at the round barrier, outside the agents' protocol.
template <class State>
using BarrierHook = std::function<void(World<State>&)>;

template <class State>
struct RunResult {
    std::optional<std::uint64_t> discovery_round;
    World<State> final_world;
    bool stopped_by_observer = false;
};

/// Steps until an agent stands on the treasure, `max_rounds` is reached, or
/// an observer asks to stop.
template <class State, class Controller>
RunResult<State> run(World<State> w, const Controller& ctl, const KeyedRng& rng,
                     std::uint64_t max_rounds, std::span<Observer<State>* const> observers = {},
                     const BarrierHook<State>& barrier = {}, const StepOptions& opt = {}) {
    RunResult<State> result;
    if (barrier) barrier(w);
    for (auto* o : observers) o->on_start(w);
    if (w.treasure_found()) {
        result.discovery_round = w.round;
        result.final_world = std::move(w);
        return result;
    }
    while (w.round < max_rounds) {
        auto next = step(w, ctl, rng, opt);
        if (barrier) barrier(next);
        for (auto* o : observers) o->on_step(w, next);
        w = std::move(next);
        if (w.treasure_found()) {
            result.discovery_round = w.round;
            break;
        }
        if (std::any_of(observers.begin(), observers.end(),
                        [](const auto* o) { return o->wants_stop(); })) {
            result.stopped_by_observer = true;
            break;
        }
    }
    result.final_world = std::move(w);
    return result;
}

}  // namespace antsim
