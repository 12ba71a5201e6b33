#include "firing.hpp"

#include <deque>
#include <unordered_map>

namespace flowcheck {

struct OrJoinOracle::Impl {
    const CompiledNet& net;
    std::vector<std::unordered_map<Marking, bool, detail::MarkingHash>> cache;
    std::vector<std::vector<bool>> excluded; // per join, per transition

    explicit Impl(const CompiledNet& n) : net(n), cache(n.or_joins.size()), excluded(n.or_joins.size()) {
        for (std::size_t j = 0; j < n.or_joins.size(); ++j) {
            excluded[j].assign(n.transitions.size(), false);
            for (std::size_t t : n.or_joins[j].starts)
                excluded[j][t] = true;
        }
    }

    // Exhaustive search from `start` over every transition except the join's
    // own start variants. Other OR-joins fire without their guard, which
    // over-approximates their behaviour.
    bool superset_reachable(const Marking& start, std::size_t j) const {
        const OrJoin& join = net.or_joins[j];
        const std::uint64_t base = detail::marked_inputs(join, start);

        detail::MarkingTable seen;
        std::vector<std::pair<StateId, std::size_t>> parent{{0, 0}};
        seen.intern(start);
        Marking next;
        for (StateId s = 0; s < seen.size(); ++s) {
            for (std::size_t t = 0; t < net.transitions.size(); ++t) {
                if (excluded[j][t])
                    continue;
                const NetTransition& tr = net.transitions[t];
                if (!detail::covers(seen[s], tr.consume))
                    continue;
                if (auto overflow = detail::fire(net, tr, seen[s], next)) {
                    std::vector<EventLabel> witness{tr.label};
                    for (StateId cur = s; cur != 0; cur = parent[cur].first)
                        witness.push_back(net.transitions[parent[cur].second].label);
                    std::reverse(witness.begin(), witness.end());
                    throw BoundExceeded(net.places[*overflow].id, net.bound, std::move(witness));
                }
                const std::uint64_t marked = detail::marked_inputs(join, next);
                if ((marked & base) == base && marked != base)
                    return true;
                if (seen.intern(next).second)
                    parent.emplace_back(s, t);
            }
        }
        return false;
    }
};

OrJoinOracle::OrJoinOracle(const CompiledNet& net) : impl_(std::make_unique<Impl>(net)) {}
OrJoinOracle::~OrJoinOracle() = default;
OrJoinOracle::OrJoinOracle(OrJoinOracle&&) noexcept = default;

bool OrJoinOracle::enabled(const Marking& marking, std::size_t or_join) {
    const OrJoin& join = impl_->net.or_joins.at(or_join);
    if (detail::marked_inputs(join, marking) == 0)
        return false;
    auto& cache = impl_->cache[or_join];
    if (auto it = cache.find(marking); it != cache.end())
        return it->second;
    const bool result = !impl_->superset_reachable(marking, or_join);
    cache.emplace(marking, result);
    return result;
}

std::size_t OrJoinOracle::cache_size() const {
    std::size_t n = 0;
    for (const auto& c : impl_->cache)
        n += c.size();
    return n;
}

bool or_join_enabled(const CompiledNet& net, const Marking& marking, std::string_view task) {
    for (std::size_t j = 0; j < net.or_joins.size(); ++j) {
        if (net.or_joins[j].task == task) {
            OrJoinOracle oracle(net);
            return oracle.enabled(marking, j);
        }
    }
    throw Error("task '" + std::string(task) + "' is not an OR-join");
}

} // namespace flowcheck
