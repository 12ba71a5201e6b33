#include "flowcheck/fltl.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace flowcheck {

namespace {

struct ProductState {
    StateId lts;
    std::uint32_t buchi;
    FluentTracker::Valuation valuation;

    bool operator==(const ProductState&) const = default;
};

struct ProductHash {
    std::size_t operator()(const ProductState& p) const {
        std::uint64_t h = p.valuation * 0x9e3779b97f4a7c15ull;
        h ^= (static_cast<std::uint64_t>(p.lts) << 32 | p.buchi) + 0x7f4a7c159e3779b9ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

struct Move {
    std::uint32_t target; // product index
    LabelId label;
};

// A literal compiled against the LTS alphabet and the tracked fluent bits.
struct CompiledLiteral {
    bool is_event;
    std::int64_t index; // label id or fluent bit; -1 for an event outside the alphabet
    bool positive;
};

class Product {
public:
    Product(const Lts& lts, const FluentTracker& tracker, const BuchiAutomaton& ba, std::size_t limit)
        : lts_(lts), ba_(ba), limit_(limit) {
        effects_.resize(lts.alphabet.size());
        for (LabelId l = 0; l < lts.alphabet.size(); ++l) {
            const auto all = ~FluentTracker::Valuation{0};
            // set = bits forced on, clear = bits forced off
            const auto on = tracker.step(0, lts.alphabet[l]);
            const auto off = ~tracker.step(all, lts.alphabet[l]);
            effects_[l] = {on, off};
        }
        constraints_.resize(ba.edges.size());
        for (std::size_t q = 0; q < ba.edges.size(); ++q) {
            for (const auto& e : ba.edges[q]) {
                std::vector<CompiledLiteral> lits;
                for (const auto& lit : e.constraint) {
                    const Formula& atom = ba.atoms[lit.atom];
                    if (atom.op == Op::Event) {
                        auto id = lts.label_id(atom.name);
                        lits.push_back({true, id ? static_cast<std::int64_t>(*id) : -1, lit.positive});
                    } else {
                        auto bit = tracker.index(atom.name);
                        if (!bit)
                            throw Error("fluent '" + atom.name + "' is not tracked");
                        lits.push_back({false, static_cast<std::int64_t>(*bit), lit.positive});
                    }
                }
                constraints_[q].push_back(std::move(lits));
            }
        }
        intern(ProductState{0, ba.initial, tracker.initial()});
    }

    std::uint32_t intern(const ProductState& p) {
        auto [it, inserted] = index_.emplace(p, static_cast<std::uint32_t>(states_.size()));
        if (inserted) {
            if (states_.size() >= limit_)
                throw ProductLimitExceeded(limit_);
            states_.push_back(p);
            accepting_.push_back(ba_.accepting[0][p.buchi]);
        }
        return it->second;
    }

    std::vector<Move> successors(std::uint32_t id) {
        std::vector<Move> out;
        const ProductState p = states_[id];
        for (const auto& edge : lts_.edges[p.lts]) {
            const auto [on, off] = effects_[edge.label];
            const auto v = (p.valuation & ~off) | on;
            const auto& ba_edges = ba_.edges[p.buchi];
            for (std::size_t k = 0; k < ba_edges.size(); ++k) {
                if (!holds(constraints_[p.buchi][k], edge.label, v))
                    continue;
                out.push_back(Move{intern(ProductState{edge.target, ba_edges[k].target, v}), edge.label});
            }
        }
        return out;
    }

    const ProductState& state(std::uint32_t id) const { return states_[id]; }
    bool accepting(std::uint32_t id) const { return accepting_[id]; }
    std::size_t size() const { return states_.size(); }

private:
    static bool holds(const std::vector<CompiledLiteral>& lits, LabelId label, FluentTracker::Valuation v) {
        for (const auto& lit : lits) {
            const bool value = lit.is_event ? lit.index == static_cast<std::int64_t>(label) : ((v >> lit.index) & 1);
            if (value != lit.positive)
                return false;
        }
        return true;
    }

    const Lts& lts_;
    const BuchiAutomaton& ba_;
    std::size_t limit_;
    std::vector<std::pair<FluentTracker::Valuation, FluentTracker::Valuation>> effects_;
    std::vector<std::vector<std::vector<CompiledLiteral>>> constraints_;
    std::unordered_map<ProductState, std::uint32_t, ProductHash> index_;
    std::vector<ProductState> states_;
    std::vector<bool> accepting_;
};

/// Lasso over product states: path[0] is the initial state, path[loop] is
/// where the cycle starts, and the last move returns to path[loop].
struct ProductLasso {
    std::vector<std::uint32_t> path;
    std::vector<LabelId> labels; // labels[i] leads from path[i] to path[i+1] (or to path[loop] for the last)
    std::size_t loop = 0;
};

enum class Color : std::uint8_t { White, Cyan, Blue, Red };

// Nested depth-first search with cyan-state early cycle detection
// (Schwoon and Esparza).
class NestedDfs {
public:
    explicit NestedDfs(Product& product) : product_(product) {}

    std::optional<ProductLasso> run() {
        struct Frame {
            std::uint32_t state;
            std::vector<Move> moves;
            std::size_t next = 0;
        };
        std::vector<Frame> blue;
        auto push_blue = [&](std::uint32_t s) {
            color(s) = Color::Cyan;
            blue.push_back(Frame{s, product_.successors(s)});
        };
        push_blue(0);
        while (!blue.empty()) {
            Frame& top = blue.back();
            if (top.next < top.moves.size()) {
                const Move move = top.moves[top.next++];
                const Color c = color(move.target);
                if (c == Color::Cyan && (product_.accepting(top.state) || product_.accepting(move.target)))
                    return close_on_stack(blue, move, {}, {});
                if (c == Color::White)
                    push_blue(move.target);
                continue;
            }
            const std::uint32_t s = top.state;
            if (product_.accepting(s)) {
                std::vector<std::uint32_t> red_path;
                std::vector<LabelId> red_labels;
                if (auto hit = red_search(s, red_path, red_labels))
                    return close_on_stack(blue, *hit, red_path, red_labels);
                color(s) = Color::Red;
            } else {
                color(s) = Color::Blue;
            }
            blue.pop_back();
        }
        return std::nullopt;
    }

private:
    Color& color(std::uint32_t s) {
        if (colors_.size() < product_.size())
            colors_.resize(product_.size(), Color::White);
        return colors_[s];
    }

    // Red search from `seed`; on success `path`/`labels` hold the red walk
    // seed -> ... -> u and the returned move leads from u to a cyan state.
    std::optional<Move> red_search(std::uint32_t seed, std::vector<std::uint32_t>& path, std::vector<LabelId>& labels) {
        struct Frame {
            std::uint32_t state;
            std::vector<Move> moves;
            std::size_t next = 0;
            LabelId via = 0;
        };
        std::vector<Frame> red;
        red.push_back(Frame{seed, product_.successors(seed)});
        while (!red.empty()) {
            Frame& top = red.back();
            if (top.next == top.moves.size()) {
                red.pop_back();
                continue;
            }
            const Move move = top.moves[top.next++];
            const Color c = color(move.target);
            if (c == Color::Cyan) {
                for (std::size_t i = 0; i < red.size(); ++i) {
                    path.push_back(red[i].state);
                    if (i + 1 < red.size())
                        labels.push_back(red[i + 1].via);
                }
                return move;
            }
            if (c == Color::Blue) {
                color(move.target) = Color::Red;
                red.push_back(Frame{move.target, product_.successors(move.target), 0, move.label});
            }
        }
        return std::nullopt;
    }

    // The closing move targets a cyan state t on the blue stack. The cycle
    // runs from t down the blue stack, along the red walk (if any), and back
    // to t via `closing`.
    template <typename Frames>
    ProductLasso close_on_stack(const Frames& blue, const Move& closing, const std::vector<std::uint32_t>& red_path,
                                const std::vector<LabelId>& red_labels) {
        ProductLasso lasso;
        std::size_t t_index = 0;
        while (blue[t_index].state != closing.target)
            ++t_index;
        for (std::size_t i = 0; i < blue.size(); ++i) {
            lasso.path.push_back(blue[i].state);
            if (i + 1 < blue.size())
                lasso.labels.push_back(blue[i].moves[blue[i].next - 1].label);
        }
        // The blue stack ends at the red seed, which is red_path.front().
        if (!red_path.empty()) {
            lasso.labels.push_back(red_labels.empty() ? closing.label : red_labels.front());
            for (std::size_t i = 1; i < red_path.size(); ++i) {
                lasso.path.push_back(red_path[i]);
                lasso.labels.push_back(i < red_labels.size() ? red_labels[i] : closing.label);
            }
        } else {
            lasso.labels.push_back(closing.label);
        }
        lasso.loop = t_index;
        return lasso;
    }

    Product& product_;
    std::vector<Color> colors_;
};

// Replaces the prefix by a shortest product path to any state of the cycle
// and rotates the cycle to begin there.
ProductLasso reanchor(Product& product, const ProductLasso& lasso) {
    const std::size_t cycle_len = lasso.path.size() - lasso.loop;
    std::unordered_map<std::uint32_t, std::size_t> on_cycle;
    for (std::size_t i = lasso.loop; i < lasso.path.size(); ++i)
        on_cycle.emplace(lasso.path[i], i - lasso.loop);

    std::unordered_map<std::uint32_t, std::pair<std::uint32_t, LabelId>> parent;
    std::deque<std::uint32_t> queue{0};
    parent.emplace(0, std::pair{0u, LabelId{0}});
    std::uint32_t hit = 0;
    while (!queue.empty()) {
        const std::uint32_t s = queue.front();
        queue.pop_front();
        if (on_cycle.contains(s)) {
            hit = s;
            break;
        }
        for (const Move& m : product.successors(s))
            if (parent.emplace(m.target, std::pair{s, m.label}).second)
                queue.push_back(m.target);
    }

    ProductLasso out;
    std::vector<std::uint32_t> prefix_states;
    std::vector<LabelId> prefix_labels;
    for (std::uint32_t cur = hit; cur != 0;) {
        const auto [from, label] = parent.at(cur);
        prefix_states.push_back(from);
        prefix_labels.push_back(label);
        cur = from;
    }
    std::reverse(prefix_states.begin(), prefix_states.end());
    std::reverse(prefix_labels.begin(), prefix_labels.end());
    out.path = prefix_states;
    out.labels = prefix_labels;
    out.loop = out.path.size();
    const std::size_t offset = on_cycle.at(hit);
    for (std::size_t k = 0; k < cycle_len; ++k) {
        const std::size_t i = lasso.loop + (offset + k) % cycle_len;
        out.path.push_back(lasso.path[i]);
        out.labels.push_back(lasso.labels[i]);
    }
    return out;
}

} // namespace

Verdict check(const Lts& lts, std::span<const FluentDef> fluents, const Formula& formula, const CheckOptions& options,
              CheckStats* stats) {
    std::vector<FluentDef> used;
    for (const auto& name : fluent_refs(formula)) {
        auto it = std::find_if(fluents.begin(), fluents.end(), [&](const FluentDef& f) { return f.name == name; });
        if (it == fluents.end())
            throw Error("formula refers to undeclared fluent '" + name + "'");
        used.push_back(*it);
    }
    if (!placeholders(formula).empty())
        throw Error("formula has unbound placeholders");

    const FluentTracker tracker(used);
    const BuchiAutomaton ba = ltl_to_buchi(fml::not_(formula)).degeneralize();
    Product product(lts, tracker, ba, options.max_product_states);

    NestedDfs search(product);
    auto found = search.run();
    if (stats) {
        stats->product_states = product.size();
        stats->automaton_states = ba.num_states();
    }
    if (!found)
        return Verdict{};

    const ProductLasso lasso = reanchor(product, *found);
    Verdict verdict;
    verdict.holds = false;
    for (std::size_t i = 0; i < lasso.path.size(); ++i) {
        verdict.states.push_back(product.state(lasso.path[i]).lts);
        (i < lasso.loop ? verdict.prefix : verdict.cycle).push_back(lts.alphabet[lasso.labels[i]]);
    }
    verdict.states.push_back(verdict.states[lasso.loop]);

    // Rotate the cycle backwards while the prefix ends the same way; the
    // infinite trace is unchanged.
    for (;;) {
        const std::size_t p = verdict.prefix.size(), c = verdict.cycle.size();
        if (p == 0 || verdict.prefix.back() != verdict.cycle.back() || verdict.states[p - 1] != verdict.states[p + c - 1])
            break;
        verdict.prefix.pop_back();
        std::rotate(verdict.cycle.rbegin(), verdict.cycle.rbegin() + 1, verdict.cycle.rend());
        verdict.states.pop_back();
    }

    // Every violation is re-validated against the reference semantics and
    // the LTS before it is reported.
    for (std::size_t i = 0; i + 1 < verdict.states.size(); ++i) {
        const auto& label = i < verdict.prefix.size() ? verdict.prefix[i] : verdict.cycle[i - verdict.prefix.size()];
        const auto id = lts.label_id(label);
        const auto& out = lts.edges[verdict.states[i]];
        if (!id || std::none_of(out.begin(), out.end(), [&](const LtsEdge& e) {
                return e.label == *id && e.target == verdict.states[i + 1];
            }))
            throw std::logic_error("counterexample does not replay in the LTS");
    }
    if (eval_on_lasso(formula, used, verdict.prefix, verdict.cycle))
        throw std::logic_error("counterexample does not falsify " + to_string(formula));
    return verdict;
}

bool replays(const Lts& lts, std::span<const EventLabel> prefix, std::span<const EventLabel> cycle) {
    if (cycle.empty() || lts.num_states() == 0)
        return false;
    std::vector<LabelId> pre, loop;
    for (const auto& e : prefix) {
        auto id = lts.label_id(e);
        if (!id)
            return false;
        pre.push_back(*id);
    }
    for (const auto& e : cycle) {
        auto id = lts.label_id(e);
        if (!id)
            return false;
        loop.push_back(*id);
    }
    auto post = [&](const std::set<StateId>& from, LabelId label) {
        std::set<StateId> out;
        for (StateId s : from)
            for (const auto& e : lts.edges[s])
                if (e.label == label)
                    out.insert(e.target);
        return out;
    };
    auto post_cycle = [&](std::set<StateId> from) {
        for (LabelId l : loop)
            from = post(from, l);
        return from;
    };

    std::set<StateId> start{0};
    for (LabelId l : pre)
        start = post(start, l);
    if (start.empty())
        return false;

    // States reachable from `start` at cycle boundaries, then the greatest
    // subset from which the cycle can be repeated forever.
    std::set<StateId> reach = start, frontier = start;
    while (!frontier.empty()) {
        std::set<StateId> next;
        for (StateId s : post_cycle(frontier))
            if (reach.insert(s).second)
                next.insert(s);
        frontier = std::move(next);
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (auto it = reach.begin(); it != reach.end();) {
            const auto succ = post_cycle({*it});
            const bool keeps = std::any_of(succ.begin(), succ.end(), [&](StateId t) { return reach.contains(t); });
            if (!keeps) {
                it = reach.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    return std::any_of(start.begin(), start.end(), [&](StateId s) { return reach.contains(s); });
}

} // namespace flowcheck
