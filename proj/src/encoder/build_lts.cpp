#include "firing.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <sstream>

namespace flowcheck {

std::size_t Lts::num_transitions() const {
    std::size_t n = 0;
    for (const auto& out : edges)
        n += out.size();
    return n;
}

std::optional<LabelId> Lts::label_id(std::string_view label) const {
    auto it = std::lower_bound(alphabet.begin(), alphabet.end(), label);
    if (it == alphabet.end() || *it != label)
        return std::nullopt;
    return static_cast<LabelId>(it - alphabet.begin());
}

namespace detail {

Explorer::Explorer(const CompiledNet& net) : net_(net) {
    auto id_of = [&](std::string_view label) {
        auto it = std::lower_bound(net.alphabet.begin(), net.alphabet.end(), label);
        if (it == net.alphabet.end() || *it != label)
            throw Error("label '" + std::string(label) + "' missing from the compiled alphabet");
        return static_cast<LabelId>(it - net.alphabet.begin());
    };
    labels_.reserve(net.transitions.size());
    subset_.assign(net.transitions.size(), 0);
    for (std::size_t t = 0; t < net.transitions.size(); ++t) {
        labels_.push_back(id_of(net.transitions[t].label));
        if (auto j = net.transitions[t].or_join)
            subset_[t] = consumed_inputs(net.or_joins[*j], net.transitions[t]);
    }
    terminate_ = id_of(kTerminate);
    deadlock_ = id_of(kDeadlock);
}

Expansion Explorer::expand(const Marking& m, OrJoinOracle& oracle) const {
    Expansion out;
    if (is_final(net_, m)) {
        out.final = true;
        return out;
    }
    std::vector<signed char> join_enabled(net_.or_joins.size(), -1);
    for (std::size_t t = 0; t < net_.transitions.size(); ++t) {
        const NetTransition& tr = net_.transitions[t];
        if (!covers(m, tr.consume))
            continue;
        if (tr.or_join) {
            const std::size_t j = *tr.or_join;
            if (subset_[t] != marked_inputs(net_.or_joins[j], m))
                continue;
            if (join_enabled[j] < 0) {
                try {
                    join_enabled[j] = oracle.enabled(m, j) ? 1 : 0;
                } catch (const BoundExceeded& e) {
                    out.overflow = *net_.find_place(e.place());
                    out.overflow_path = e.witness();
                    return out;
                }
            }
            if (!join_enabled[j])
                continue;
        }
        Marking next;
        if (auto overflow = fire(net_, tr, m, next)) {
            out.overflow = overflow;
            out.overflow_path = {tr.label};
            return out;
        }
        out.successors.push_back(Successor{labels_[t], std::move(next)});
    }
    std::sort(out.successors.begin(), out.successors.end(), [](const Successor& a, const Successor& b) {
        if (a.label != b.label)
            return a.label < b.label;
        return a.marking < b.marking;
    });
    return out;
}

LtsAssembler::LtsAssembler(const Explorer& explorer, const BuildLimits& limits)
    : explorer_(explorer), limits_(limits) {
    table_.intern(explorer.net().initial);
    parent_.emplace_back(0, 0);
}

std::vector<EventLabel> LtsAssembler::path_to(StateId state) const {
    std::vector<EventLabel> path;
    for (StateId cur = state; cur != 0; cur = parent_[cur].first)
        path.push_back(explorer_.net().alphabet[parent_[cur].second]);
    std::reverse(path.begin(), path.end());
    return path;
}

void LtsAssembler::commit(StateId state, Expansion&& expansion) {
    if (edges_.size() <= state) {
        edges_.resize(state + 1);
        final_.resize(state + 1, false);
    }
    auto& out = edges_[state];
    if (expansion.final) {
        final_[state] = true;
        out.push_back(LtsEdge{explorer_.terminate(), state});
        return;
    }
    if (expansion.overflow) {
        auto witness = path_to(state);
        witness.insert(witness.end(), expansion.overflow_path.begin(), expansion.overflow_path.end());
        const CompiledNet& net = explorer_.net();
        throw BoundExceeded(net.places[*expansion.overflow].id, net.bound, std::move(witness));
    }
    if (expansion.successors.empty()) {
        out.push_back(LtsEdge{explorer_.deadlock(), state});
        return;
    }
    for (auto& succ : expansion.successors) {
        auto [id, inserted] = table_.intern(std::move(succ.marking));
        if (inserted) {
            if (table_.size() > limits_.max_states)
                throw StateLimitExceeded(limits_.max_states);
            parent_.emplace_back(state, succ.label);
        }
        const LtsEdge edge{succ.label, id};
        if (out.empty() || !(out.back() == edge))
            out.push_back(edge);
    }
}

Lts LtsAssembler::finish() {
    Lts lts;
    lts.alphabet = explorer_.net().alphabet;
    lts.edges = std::move(edges_);
    lts.final = std::move(final_);
    lts.markings = table_.release();
    lts.terminate = explorer_.terminate();
    lts.deadlock = explorer_.deadlock();
    return lts;
}

} // namespace detail

Lts build_lts(const CompiledNet& net, const BuildLimits& limits) {
    detail::Explorer explorer(net);
    detail::LtsAssembler assembler(explorer, limits);
    OrJoinOracle oracle(net);
    for (StateId s = 0; s < assembler.table().size(); ++s)
        assembler.commit(s, explorer.expand(assembler.table()[s], oracle));
    return assembler.finish();
}

std::vector<EventLabel> shortest_path(const Lts& lts, StateId target) {
    std::vector<std::pair<StateId, LabelId>> parent(lts.num_states(), {0, 0});
    std::vector<bool> seen(lts.num_states(), false);
    std::deque<StateId> queue{0};
    seen[0] = true;
    while (!queue.empty() && !seen[target]) {
        const StateId s = queue.front();
        queue.pop_front();
        for (const auto& e : lts.edges[s]) {
            if (!seen[e.target]) {
                seen[e.target] = true;
                parent[e.target] = {s, e.label};
                queue.push_back(e.target);
            }
        }
    }
    std::vector<EventLabel> path;
    for (StateId cur = target; cur != 0; cur = parent[cur].first)
        path.push_back(lts.alphabet[parent[cur].second]);
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<Deadlock> find_deadlocks(const Lts& lts) {
    std::vector<Deadlock> out;
    for (StateId s = 0; s < lts.num_states(); ++s) {
        const auto& edges = lts.edges[s];
        if (edges.size() == 1 && edges[0].label == lts.deadlock && edges[0].target == s)
            out.push_back(Deadlock{s, shortest_path(lts, s)});
    }
    return out;
}

void write_edges(const Lts& lts, std::ostream& out) {
    for (StateId s = 0; s < lts.num_states(); ++s)
        for (const auto& e : lts.edges[s])
            out << s << '\t' << lts.alphabet[e.label] << '\t' << e.target << '\n';
}

std::string describe_marking(const CompiledNet& net, const Marking& marking) {
    std::ostringstream out;
    out << '{';
    bool first = true;
    for (PlaceId p = 0; p < marking.size(); ++p) {
        if (!marking[p])
            continue;
        out << (first ? "" : ", ") << net.places[p].id;
        if (marking[p] > 1)
            out << '*' << marking[p];
        first = false;
    }
    out << '}';
    return out.str();
}

} // namespace flowcheck
