#pragma once

#include "flowcheck/encoder.hpp"

#include <unordered_set>

namespace flowcheck::detail {

inline std::size_t hash_marking(const Marking& m) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ m.size();
    for (auto v : m) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

struct MarkingHash {
    std::size_t operator()(const Marking& m) const { return hash_marking(m); }
};

inline bool covers(const Marking& m, const std::vector<PlaceCount>& consume) {
    for (const auto& [p, n] : consume)
        if (m[p] < n)
            return false;
    return true;
}

/// out = ((m - consume) with resets zeroed) + produce. Returns the first
/// place pushed above its capacity, if any.
inline std::optional<PlaceId> fire(const CompiledNet& net, const NetTransition& t, const Marking& m, Marking& out) {
    out = m;
    for (const auto& [p, n] : t.consume)
        out[p] = static_cast<std::uint16_t>(out[p] - n);
    for (PlaceId p : t.resets)
        out[p] = 0;
    std::optional<PlaceId> overflow;
    for (const auto& [p, n] : t.produce) {
        const int count = out[p] + n;
        if (count > net.places[p].capacity && !overflow)
            overflow = p;
        out[p] = static_cast<std::uint16_t>(std::min(count, 0xffff));
    }
    return overflow;
}

inline std::uint64_t marked_inputs(const OrJoin& join, const Marking& m) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < join.inputs.size(); ++i)
        if (m[join.inputs[i]] > 0)
            mask |= std::uint64_t{1} << i;
    return mask;
}

inline std::uint64_t consumed_inputs(const OrJoin& join, const NetTransition& t) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < join.inputs.size(); ++i)
        for (const auto& [p, n] : t.consume)
            if (p == join.inputs[i])
                mask |= std::uint64_t{1} << i;
    return mask;
}

inline bool is_final(const CompiledNet& net, const Marking& m) {
    for (PlaceId p = 0; p < m.size(); ++p)
        if (m[p] != (p == net.final_place ? 1 : 0))
            return false;
    return true;
}

/// Interning table mapping markings to dense state ids in insertion order.
class MarkingTable {
public:
    MarkingTable() : index_(64, Hash{&markings_}, Eq{&markings_}) {}
    MarkingTable(const MarkingTable&) = delete;
    MarkingTable& operator=(const MarkingTable&) = delete;

    std::pair<StateId, bool> intern(Marking m) {
        markings_.push_back(std::move(m));
        const auto id = static_cast<StateId>(markings_.size() - 1);
        auto [it, inserted] = index_.insert(id);
        if (!inserted) {
            markings_.pop_back();
            return {*it, false};
        }
        return {id, true};
    }

    std::size_t size() const { return markings_.size(); }
    const Marking& operator[](StateId id) const { return markings_[id]; }
    std::vector<Marking> release() {
        index_.clear();
        return std::move(markings_);
    }

private:
    struct Hash {
        const std::vector<Marking>* markings;
        std::size_t operator()(StateId id) const { return hash_marking((*markings)[id]); }
    };
    struct Eq {
        const std::vector<Marking>* markings;
        bool operator()(StateId a, StateId b) const { return (*markings)[a] == (*markings)[b]; }
    };

    std::vector<Marking> markings_;
    std::unordered_set<StateId, Hash, Eq> index_;
};

struct Successor {
    LabelId label;
    Marking marking;
};

struct Expansion {
    bool final = false;
    std::vector<Successor> successors;
    // Set when a firing from this state overflows a place; `overflow_path`
    // holds the events from this state up to and including the overflow.
    std::optional<PlaceId> overflow;
    std::vector<EventLabel> overflow_path;
};

/// Per-net data shared by the serial and parallel builders.
class Explorer {
public:
    explicit Explorer(const CompiledNet& net);

    Expansion expand(const Marking& m, OrJoinOracle& oracle) const;

    const CompiledNet& net() const { return net_; }
    LabelId terminate() const { return terminate_; }
    LabelId deadlock() const { return deadlock_; }

private:
    const CompiledNet& net_;
    std::vector<LabelId> labels_;       // per transition
    std::vector<std::uint64_t> subset_; // per transition, OR-join inputs consumed
    LabelId terminate_ = 0;
    LabelId deadlock_ = 0;
};

/// Drives the sequential part of exploration: interning successors,
/// enforcing the state limit and recording BFS parents for witnesses.
class LtsAssembler {
public:
    LtsAssembler(const Explorer& explorer, const BuildLimits& limits);

    MarkingTable& table() { return table_; }
    void commit(StateId state, Expansion&& expansion);
    Lts finish();

private:
    std::vector<EventLabel> path_to(StateId state) const;

    const Explorer& explorer_;
    BuildLimits limits_;
    MarkingTable table_;
    std::vector<std::pair<StateId, LabelId>> parent_;
    std::vector<std::vector<LtsEdge>> edges_;
    std::vector<bool> final_;
};

} // namespace flowcheck::detail
