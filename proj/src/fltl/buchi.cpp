#include "flowcheck/fltl.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace flowcheck {

namespace {

Formula nnf(const Formula& f, bool negate);

Formula nnf_binary(Op op, const Formula& a, const Formula& b, bool na, bool nb) {
    return fml::binary(op, nnf(a, na), nnf(b, nb));
}

Formula nnf(const Formula& f, bool negate) {
    switch (f.op) {
    case Op::True: return negate ? fml::falsity() : fml::truth();
    case Op::False: return negate ? fml::truth() : fml::falsity();
    case Op::Event:
    case Op::Fluent: return negate ? fml::not_(f) : f;
    case Op::Placeholder: throw Error("cannot translate unbound placeholder $" + f.name);
    case Op::Not: return nnf(f.args[0], !negate);
    case Op::Next: return fml::next(nnf(f.args[0], negate));
    case Op::Eventually:
        // <>a = true U a
        return negate ? fml::release(fml::falsity(), nnf(f.args[0], true))
                      : fml::until(fml::truth(), nnf(f.args[0], false));
    case Op::Always:
        // []a = false R a
        return negate ? fml::until(fml::truth(), nnf(f.args[0], true))
                      : fml::release(fml::falsity(), nnf(f.args[0], false));
    case Op::And: return nnf_binary(negate ? Op::Or : Op::And, f.args[0], f.args[1], negate, negate);
    case Op::Or: return nnf_binary(negate ? Op::And : Op::Or, f.args[0], f.args[1], negate, negate);
    case Op::Implies: return nnf_binary(negate ? Op::And : Op::Or, f.args[0], f.args[1], !negate, negate);
    case Op::Iff: {
        const Formula& a = f.args[0];
        const Formula& b = f.args[1];
        // a <-> b = (a && b) || (!a && !b);  !(a <-> b) = (a && !b) || (!a && b)
        return fml::or_(fml::and_(nnf(a, false), nnf(b, negate)), fml::and_(nnf(a, true), nnf(b, !negate)));
    }
    case Op::Until: return nnf_binary(negate ? Op::Release : Op::Until, f.args[0], f.args[1], negate, negate);
    case Op::Release: return nnf_binary(negate ? Op::Until : Op::Release, f.args[0], f.args[1], negate, negate);
    case Op::WeakUntil: {
        // a W b = b R (a || b);  !(a W b) = !b U (!a && !b)
        const Formula& a = f.args[0];
        const Formula& b = f.args[1];
        if (!negate)
            return fml::release(nnf(b, false), fml::or_(nnf(a, false), nnf(b, false)));
        return fml::until(nnf(b, true), fml::and_(nnf(a, true), nnf(b, true)));
    }
    }
    throw Error("malformed formula");
}

// Tableau expansion in the style of Gerth, Peled, Vardi and Wolper.
class Tableau {
public:
    explicit Tableau(const Formula& root) { root_ = intern(root); }

    BuchiAutomaton build() {
        Node start;
        start.incoming.insert(kInit);
        start.fresh.insert(root_);
        expand(std::move(start));
        return to_automaton();
    }

private:
    static constexpr int kInit = 0;

    struct Node {
        int id = -1;
        std::set<int> incoming;
        std::set<int> fresh; // "new" in the classic presentation
        std::set<int> old;
        std::set<int> next;
    };

    int intern(const Formula& f) {
        const std::string key = to_string(f);
        if (auto it = ids_.find(key); it != ids_.end())
            return it->second;
        std::vector<int> kids;
        for (const auto& a : f.args)
            kids.push_back(intern(a));
        const int id = static_cast<int>(formulas_.size());
        ids_.emplace(key, id);
        formulas_.push_back(f);
        children_.push_back(std::move(kids));
        return id;
    }

    bool is_literal(int id) const {
        const Formula& f = formulas_[id];
        return f.is_atom() || f.op == Op::Not;
    }

    // Id of the complementary literal, or -1 when it never occurs.
    int complement(int id) const {
        const Formula& f = formulas_[id];
        const std::string key = f.op == Op::Not ? to_string(f.args[0]) : to_string(fml::not_(f));
        auto it = ids_.find(key);
        return it == ids_.end() ? -1 : it->second;
    }

    void add_fresh(Node& node, int id) {
        if (!node.old.contains(id))
            node.fresh.insert(id);
    }

    void expand(Node node) {
        if (node.fresh.empty()) {
            for (auto& done : nodes_) {
                if (done.old == node.old && done.next == node.next) {
                    done.incoming.insert(node.incoming.begin(), node.incoming.end());
                    return;
                }
            }
            node.id = static_cast<int>(nodes_.size()) + 1;
            nodes_.push_back(node);
            Node succ;
            succ.incoming.insert(node.id);
            succ.fresh = node.next;
            expand(std::move(succ));
            return;
        }
        const int eta = *node.fresh.begin();
        node.fresh.erase(node.fresh.begin());
        const Formula& f = formulas_[eta];
        if (is_literal(eta)) {
            if (f.op == Op::False)
                return;
            if (f.op != Op::True) {
                const int neg = complement(eta);
                if (neg >= 0 && node.old.contains(neg))
                    return;
            }
            node.old.insert(eta);
            expand(std::move(node));
            return;
        }
        const auto& kids = children_[eta];
        switch (f.op) {
        case Op::And:
            node.old.insert(eta);
            add_fresh(node, kids[0]);
            add_fresh(node, kids[1]);
            expand(std::move(node));
            return;
        case Op::Next:
            node.old.insert(eta);
            node.next.insert(kids[0]);
            expand(std::move(node));
            return;
        case Op::Or:
        case Op::Until:
        case Op::Release: {
            node.old.insert(eta);
            Node first = node, second = node;
            if (f.op == Op::Or) {
                add_fresh(first, kids[0]);
                add_fresh(second, kids[1]);
            } else if (f.op == Op::Until) {
                add_fresh(first, kids[0]);
                first.next.insert(eta);
                add_fresh(second, kids[1]);
            } else {
                add_fresh(first, kids[1]);
                first.next.insert(eta);
                add_fresh(second, kids[0]);
                add_fresh(second, kids[1]);
            }
            expand(std::move(first));
            expand(std::move(second));
            return;
        }
        default: throw Error("formula is not in negation normal form");
        }
    }

    BuchiAutomaton to_automaton() const {
        BuchiAutomaton out;
        std::map<std::string, std::uint32_t> atom_ids;
        auto atom_of = [&](const Formula& atom) {
            const std::string key = (atom.op == Op::Event ? "e:" : "f:") + atom.name;
            auto [it, inserted] = atom_ids.emplace(key, static_cast<std::uint32_t>(out.atoms.size()));
            if (inserted)
                out.atoms.push_back(atom);
            return it->second;
        };

        out.initial = kInit;
        out.edges.resize(nodes_.size() + 1);
        std::vector<std::vector<BuchiLiteral>> labels(nodes_.size() + 1);
        for (const auto& node : nodes_) {
            for (int id : node.old) {
                const Formula& f = formulas_[id];
                if (f.op == Op::Event || f.op == Op::Fluent)
                    labels[node.id].push_back(BuchiLiteral{atom_of(f), true});
                else if (f.op == Op::Not)
                    labels[node.id].push_back(BuchiLiteral{atom_of(f.args[0]), false});
            }
        }
        for (const auto& node : nodes_)
            for (int from : node.incoming)
                out.edges[from].push_back(BuchiEdge{static_cast<std::uint32_t>(node.id), labels[node.id]});
        for (auto& edges : out.edges)
            std::sort(edges.begin(), edges.end(), [](const BuchiEdge& a, const BuchiEdge& b) { return a.target < b.target; });

        for (std::size_t id = 0; id < formulas_.size(); ++id) {
            if (formulas_[id].op != Op::Until)
                continue;
            const int rhs = children_[id][1];
            std::vector<bool> set(nodes_.size() + 1, false);
            for (const auto& node : nodes_)
                set[node.id] = !node.old.contains(static_cast<int>(id)) || node.old.contains(rhs);
            out.accepting.push_back(std::move(set));
        }
        return out;
    }

    int root_;
    std::map<std::string, int> ids_;
    std::vector<Formula> formulas_;
    std::vector<std::vector<int>> children_;
    std::vector<Node> nodes_; // node i has id i + 1; id 0 is the initial pseudo-state
};

} // namespace

Formula to_nnf(const Formula& formula) { return nnf(formula, false); }

BuchiAutomaton ltl_to_buchi(const Formula& formula) { return Tableau(to_nnf(formula)).build(); }

BuchiAutomaton BuchiAutomaton::degeneralize() const {
    const std::size_t sets = std::max<std::size_t>(accepting.size(), 1);
    auto in_set = [&](std::uint32_t q, std::size_t i) {
        if (accepting.empty())
            return q != initial;
        return static_cast<bool>(accepting[i][q]);
    };

    BuchiAutomaton out;
    out.atoms = atoms;
    std::map<std::pair<std::uint32_t, std::size_t>, std::uint32_t> ids;
    std::deque<std::pair<std::uint32_t, std::size_t>> queue;
    auto id_of = [&](std::uint32_t q, std::size_t level) {
        auto [it, inserted] = ids.emplace(std::pair{q, level}, static_cast<std::uint32_t>(out.edges.size()));
        if (inserted) {
            out.edges.emplace_back();
            queue.emplace_back(q, level);
        }
        return it->second;
    };
    out.initial = id_of(initial, 0);
    std::vector<bool> accept;
    while (!queue.empty()) {
        const auto [q, level] = queue.front();
        queue.pop_front();
        const std::uint32_t from = ids.at({q, level});
        const std::size_t next_level = in_set(q, level) ? (level + 1) % sets : level;
        for (const auto& e : edges[q]) {
            const std::uint32_t to = id_of(e.target, next_level);
            out.edges[from].push_back(BuchiEdge{to, e.constraint});
        }
    }
    accept.assign(out.edges.size(), false);
    for (const auto& [key, id] : ids)
        accept[id] = key.second == 0 && in_set(key.first, 0);
    out.accepting.push_back(std::move(accept));
    return out;
}

bool satisfies(const BuchiAutomaton& automaton, const std::vector<BuchiLiteral>& constraint, const Letter& letter) {
    for (const auto& lit : constraint) {
        const Formula& atom = automaton.atoms[lit.atom];
        const bool value = atom.op == Op::Event ? letter.event == atom.name : letter.fluents.contains(atom.name);
        if (value != lit.positive)
            return false;
    }
    return true;
}

bool accepts(const BuchiAutomaton& automaton, const LetterLasso& word) {
    const BuchiAutomaton ba = automaton.accepting.size() == 1 ? automaton : automaton.degeneralize();
    const std::size_t n = word.prefix.size() + word.cycle.size();
    if (word.cycle.empty())
        throw Error("lasso cycle must be non-empty");
    auto letter = [&](std::size_t i) -> const Letter& {
        return i < word.prefix.size() ? word.prefix[i] : word.cycle[i - word.prefix.size()];
    };
    auto succ_pos = [&](std::size_t i) { return i + 1 < n ? i + 1 : word.prefix.size(); };

    // Explicit product of word positions and automaton states.
    using Key = std::pair<std::size_t, std::uint32_t>;
    std::map<Key, std::size_t> ids;
    std::vector<Key> keys;
    std::vector<std::vector<std::size_t>> succ;
    std::deque<std::size_t> queue;
    auto id_of = [&](Key k) {
        auto [it, inserted] = ids.emplace(k, keys.size());
        if (inserted) {
            keys.push_back(k);
            succ.emplace_back();
            queue.push_back(it->second);
        }
        return it->second;
    };
    id_of({0, ba.initial});
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        const auto [pos, q] = keys[cur];
        for (const auto& e : ba.edges[q])
            if (satisfies(ba, e.constraint, letter(pos))) {
                const std::size_t to = id_of({succ_pos(pos), e.target});
                succ[cur].push_back(to);
            }
    }
    for (std::size_t s = 0; s < keys.size(); ++s) {
        if (!ba.accepting[0][keys[s].second])
            continue;
        std::vector<bool> seen(keys.size(), false);
        std::deque<std::size_t> work(succ[s].begin(), succ[s].end());
        while (!work.empty()) {
            const std::size_t t = work.front();
            work.pop_front();
            if (t == s)
                return true;
            if (seen[t])
                continue;
            seen[t] = true;
            work.insert(work.end(), succ[t].begin(), succ[t].end());
        }
    }
    return false;
}

} // namespace flowcheck
