#include "flowcheck/fltl.hpp"

#include <algorithm>
#include <map>

namespace flowcheck {

FluentTracker::FluentTracker(std::vector<FluentDef> fluents) : fluents_(std::move(fluents)) {
    if (fluents_.size() > 64)
        throw Error("at most 64 fluents can be tracked at once");
    for (std::size_t i = 0; i < fluents_.size(); ++i) {
        const Valuation bit = Valuation{1} << i;
        if (fluents_[i].initially)
            initial_ |= bit;
        for (const auto& e : fluents_[i].initiating)
            effects_[e].first |= bit;
        for (const auto& e : fluents_[i].terminating)
            effects_[e].second |= bit;
    }
    for (const auto& [event, effect] : effects_)
        if (effect.first & effect.second)
            throw Error("event '" + event + "' both initiates and terminates a fluent");
}

FluentTracker::Valuation FluentTracker::step(Valuation v, std::string_view event) const {
    auto it = effects_.find(event);
    if (it == effects_.end())
        return v;
    return (v & ~it->second.second) | it->second.first;
}

std::optional<std::size_t> FluentTracker::index(std::string_view fluent) const {
    for (std::size_t i = 0; i < fluents_.size(); ++i)
        if (fluents_[i].name == fluent)
            return i;
    return std::nullopt;
}

bool FluentTracker::holds(Valuation v, std::string_view fluent) const {
    auto i = index(fluent);
    if (!i)
        throw Error("unknown fluent '" + std::string(fluent) + "'");
    return (v >> *i) & 1;
}

std::map<std::string, bool> FluentTracker::describe(Valuation v) const {
    std::map<std::string, bool> out;
    for (std::size_t i = 0; i < fluents_.size(); ++i)
        out[fluents_[i].name] = (v >> i) & 1;
    return out;
}

namespace {

std::set<std::string> holding(const FluentTracker& tracker, FluentTracker::Valuation v) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < tracker.fluents().size(); ++i)
        if ((v >> i) & 1)
            out.insert(tracker.fluents()[i].name);
    return out;
}

} // namespace

LetterLasso unroll_lasso(std::span<const FluentDef> fluents, std::span<const EventLabel> prefix,
                         std::span<const EventLabel> cycle) {
    if (cycle.empty())
        throw Error("lasso cycle must be non-empty");
    FluentTracker tracker({fluents.begin(), fluents.end()});
    LetterLasso out;
    auto v = tracker.initial();
    for (const auto& e : prefix) {
        v = tracker.step(v, e);
        out.prefix.push_back(Letter{e, holding(tracker, v)});
    }
    // The valuation entering a cycle iteration determines that iteration, so
    // the first repeated entry valuation closes the loop.
    std::map<FluentTracker::Valuation, std::size_t> entry;
    std::vector<Letter> unrolled;
    std::size_t iteration = 0;
    while (!entry.contains(v)) {
        entry[v] = iteration++;
        for (const auto& e : cycle) {
            v = tracker.step(v, e);
            unrolled.push_back(Letter{e, holding(tracker, v)});
        }
    }
    const std::size_t loop_start = entry[v] * cycle.size();
    out.prefix.insert(out.prefix.end(), unrolled.begin(), unrolled.begin() + static_cast<std::ptrdiff_t>(loop_start));
    out.cycle.assign(unrolled.begin() + static_cast<std::ptrdiff_t>(loop_start), unrolled.end());
    return out;
}

namespace {

class LassoEvaluator {
public:
    explicit LassoEvaluator(const LetterLasso& word) : word_(word) {
        n_ = word.prefix.size() + word.cycle.size();
        if (word.cycle.empty())
            throw Error("lasso cycle must be non-empty");
    }

    std::vector<bool> eval(const Formula& f) const {
        std::vector<bool> out(n_);
        switch (f.op) {
        case Op::True: out.assign(n_, true); return out;
        case Op::False: return out;
        case Op::Event:
            for (std::size_t i = 0; i < n_; ++i)
                out[i] = at(i).event == f.name;
            return out;
        case Op::Fluent:
            for (std::size_t i = 0; i < n_; ++i)
                out[i] = at(i).fluents.contains(f.name);
            return out;
        case Op::Placeholder: throw Error("cannot evaluate unbound placeholder $" + f.name);
        default: break;
        }
        const auto a = eval(f.args[0]);
        if (f.args.size() == 1) {
            switch (f.op) {
            case Op::Not:
                for (std::size_t i = 0; i < n_; ++i)
                    out[i] = !a[i];
                return out;
            case Op::Next:
                for (std::size_t i = 0; i < n_; ++i)
                    out[i] = a[succ(i)];
                return out;
            case Op::Eventually: return fixpoint(false, [&](std::size_t i, bool x) { return a[i] || x; });
            case Op::Always: return fixpoint(true, [&](std::size_t i, bool x) { return a[i] && x; });
            default: break;
            }
        }
        const auto b = eval(f.args[1]);
        switch (f.op) {
        case Op::And:
            for (std::size_t i = 0; i < n_; ++i)
                out[i] = a[i] && b[i];
            return out;
        case Op::Or:
            for (std::size_t i = 0; i < n_; ++i)
                out[i] = a[i] || b[i];
            return out;
        case Op::Implies:
            for (std::size_t i = 0; i < n_; ++i)
                out[i] = !a[i] || b[i];
            return out;
        case Op::Iff:
            for (std::size_t i = 0; i < n_; ++i)
                out[i] = a[i] == b[i];
            return out;
        case Op::Until: return fixpoint(false, [&](std::size_t i, bool x) { return b[i] || (a[i] && x); });
        case Op::WeakUntil: return fixpoint(true, [&](std::size_t i, bool x) { return b[i] || (a[i] && x); });
        case Op::Release: return fixpoint(true, [&](std::size_t i, bool x) { return b[i] && (a[i] || x); });
        default: throw Error("malformed formula");
        }
    }

private:
    const Letter& at(std::size_t i) const {
        return i < word_.prefix.size() ? word_.prefix[i] : word_.cycle[i - word_.prefix.size()];
    }
    std::size_t succ(std::size_t i) const { return i + 1 < n_ ? i + 1 : word_.prefix.size(); }

    // Least (init false) or greatest (init true) solution of
    // x_i = step(i, x_succ(i)); backward sweeps reach it in at most n+1 rounds.
    template <typename Step>
    std::vector<bool> fixpoint(bool init, Step step) const {
        std::vector<bool> x(n_, init);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t k = n_; k-- > 0;) {
                const bool v = step(k, x[succ(k)]);
                if (v != x[k]) {
                    x[k] = v;
                    changed = true;
                }
            }
        }
        return x;
    }

    const LetterLasso& word_;
    std::size_t n_;
};

} // namespace

bool eval_on_letters(const Formula& formula, const LetterLasso& word) {
    return LassoEvaluator(word).eval(formula)[0];
}

bool eval_on_lasso(const Formula& formula, std::span<const FluentDef> fluents, std::span<const EventLabel> prefix,
                   std::span<const EventLabel> cycle) {
    for (const auto& name : fluent_refs(formula))
        if (std::none_of(fluents.begin(), fluents.end(), [&](const FluentDef& f) { return f.name == name; }))
            throw Error("formula refers to undeclared fluent '" + name + "'");
    return eval_on_letters(formula, unroll_lasso(fluents, prefix, cycle));
}

} // namespace flowcheck
