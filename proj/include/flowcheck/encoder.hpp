#pragma once

// Compilation of a workflow into a bounded reset net, and exploration of
// its marking graph into a labelled transition system.

#include "flowcheck/workflow.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace flowcheck {

using PlaceId = std::uint32_t;
using StateId = std::uint32_t;
using LabelId = std::uint32_t;

enum class PlaceOrigin { Condition, Busy, MiActive, MiCompleted };

struct Place {
    std::string id;
    PlaceOrigin origin = PlaceOrigin::Condition;
    std::string node; // path-qualified condition or task
    int capacity = 1;
};

using PlaceCount = std::pair<PlaceId, std::uint16_t>;

struct NetTransition {
    EventLabel label;
    std::vector<PlaceCount> consume;
    std::vector<PlaceCount> produce;
    std::vector<PlaceId> resets;
    /// Index into CompiledNet::or_joins when this is a `t.start` variant of an OR-join.
    std::optional<std::size_t> or_join;
};

struct OrJoin {
    std::string task; // path-qualified
    std::vector<PlaceId> inputs;
    std::vector<std::size_t> starts; // transitions that are variants of `task.start`
};

/// Token counts indexed by PlaceId.
using Marking = std::vector<std::uint16_t>;

struct CompiledNet {
    std::vector<Place> places;
    std::vector<NetTransition> transitions;
    Marking initial;
    PlaceId final_place = 0;
    int bound = 1;
    std::vector<OrJoin> or_joins;
    std::vector<EventLabel> alphabet; // sorted

    std::optional<PlaceId> find_place(std::string_view id) const;
};

/// Builds the reset net. Places of condition nodes are named by their
/// qualified path, task places are `busy:`, `active:` and `done:` prefixed.
/// Counter places of a multiple-instance task may hold bound * max tokens.
CompiledNet compile(const WorkflowSpec& spec, int bound = 1);

struct LtsEdge {
    LabelId label;
    StateId target;

    bool operator==(const LtsEdge&) const = default;
};

struct Lts {
    std::vector<EventLabel> alphabet; // sorted, so LabelId order is label order
    std::vector<std::vector<LtsEdge>> edges;
    std::vector<bool> final;
    std::vector<Marking> markings; // marking of each state, BFS order
    LabelId terminate = 0;
    LabelId deadlock = 0;

    std::size_t num_states() const { return edges.size(); }
    std::size_t num_transitions() const;
    std::optional<LabelId> label_id(std::string_view label) const;
    const EventLabel& label(LabelId id) const { return alphabet[id]; }
};

struct BuildLimits {
    std::size_t max_states = 2'000'000;
};

/// Memoised answers to the OR-join enablement question for one net.
/// Not thread-safe; use one instance per thread.
class OrJoinOracle {
public:
    explicit OrJoinOracle(const CompiledNet& net);
    ~OrJoinOracle();
    OrJoinOracle(OrJoinOracle&&) noexcept;

    /// True iff some input of the join is marked and no marking with a
    /// strictly larger set of marked inputs is reachable without firing the
    /// join. Throws BoundExceeded if that search overflows a place.
    bool enabled(const Marking& marking, std::size_t or_join);

    std::size_t cache_size() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

bool or_join_enabled(const CompiledNet& net, const Marking& marking, std::string_view task);

/// Level-synchronous breadth-first construction of the reachable marking
/// graph. Serial reference implementation.
Lts build_lts(const CompiledNet& net, const BuildLimits& limits = {});

/// Same result as build_lts, with each BFS level's successor computation
/// spread over OpenMP threads.
Lts build_lts_parallel(const CompiledNet& net, const BuildLimits& limits = {});

struct Deadlock {
    StateId state;
    std::vector<EventLabel> path;
};

std::vector<Deadlock> find_deadlocks(const Lts& lts);

/// Shortest event path from the initial state to `target`.
std::vector<EventLabel> shortest_path(const Lts& lts, StateId target);

/// `src<TAB>label<TAB>dst`, one edge per line.
void write_edges(const Lts& lts, std::ostream& out);

std::string describe_marking(const CompiledNet& net, const Marking& marking);

} // namespace flowcheck
