#pragma once

// Fluent linear temporal logic: fluent declarations, property files,
// reference semantics on lasso words, and LTS model checking.

#include "flowcheck/encoder.hpp"
#include "flowcheck/formula.hpp"
#include "flowcheck/workflow.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace flowcheck {

/// A boolean that becomes true on any initiating event and false on any
/// terminating event. The two sets are disjoint.
struct FluentDef {
    std::string name;
    std::vector<EventLabel> initiating;
    std::vector<EventLabel> terminating;
    bool initially = false;

    bool operator==(const FluentDef&) const = default;
};

struct Assertion {
    std::string name;
    Formula formula;

    bool operator==(const Assertion&) const = default;
};

struct PropertySet {
    std::vector<FluentDef> fluents;
    std::vector<Assertion> assertions;

    bool operator==(const PropertySet&) const = default;

    const FluentDef* find_fluent(std::string_view name) const;
    const Assertion* find_assertion(std::string_view name) const;
};

/// Reads a `.flp` property file:
///   fluent NAME = <{a.start, b.start}, {c.end}> [initially true|false]
///   assert NAME = formula
///   // comment
PropertySet parse_props(std::string_view text);

std::vector<Diagnostic> validate_fluents(std::span<const FluentDef> fluents, const std::set<EventLabel>& alphabet);

/// Reports unknown fluent names, unknown event labels and leftover
/// placeholders in an assertion.
std::vector<Diagnostic> validate_formula(const Formula& formula, std::span<const FluentDef> fluents,
                                         const std::set<EventLabel>& alphabet, const std::string& where = {});

/// `Executing(task)` fluents: started by `task.start`, ended by `task.end`
/// or by the end of any task whose cancellation removes it.
std::vector<FluentDef> executing_fluents(const WorkflowSpec& spec);

/// The fluents the formula mentions: declared ones in declaration order,
/// then builtin `Executing(...)` ones.
std::vector<FluentDef> resolve_fluents(const Formula& formula, std::span<const FluentDef> declared,
                                       const WorkflowSpec& spec);

/// Deterministic valuation automaton over a fixed fluent list (at most 64).
class FluentTracker {
public:
    explicit FluentTracker(std::vector<FluentDef> fluents);

    using Valuation = std::uint64_t;

    Valuation initial() const { return initial_; }
    Valuation step(Valuation v, std::string_view event) const;
    bool holds(Valuation v, std::string_view fluent) const;
    std::optional<std::size_t> index(std::string_view fluent) const;
    const std::vector<FluentDef>& fluents() const { return fluents_; }
    std::map<std::string, bool> describe(Valuation v) const;

private:
    std::vector<FluentDef> fluents_;
    Valuation initial_ = 0;
    std::map<std::string, std::pair<Valuation, Valuation>, std::less<>> effects_; // event -> (set, clear)
};

/// One position of a word: the event and the fluents holding after it.
struct Letter {
    EventLabel event;
    std::set<std::string> fluents;

    bool operator==(const Letter&) const = default;
};

struct LetterLasso {
    std::vector<Letter> prefix;
    std::vector<Letter> cycle;
};

/// Unrolls prefix·cycle^ω until the fluent valuation at cycle boundaries
/// repeats, giving a lasso of letters with the same infinite word.
LetterLasso unroll_lasso(std::span<const FluentDef> fluents, std::span<const EventLabel> prefix,
                         std::span<const EventLabel> cycle);

/// Standard LTL semantics at position 0 of a letter lasso.
bool eval_on_letters(const Formula& formula, const LetterLasso& word);

/// Truth of `formula` at position 0 of prefix·cycle^ω under fluent semantics.
bool eval_on_lasso(const Formula& formula, std::span<const FluentDef> fluents, std::span<const EventLabel> prefix,
                   std::span<const EventLabel> cycle);

/// Negation normal form over And, Or, Next, Until, Release and literals.
Formula to_nnf(const Formula& formula);

struct BuchiLiteral {
    std::uint32_t atom;
    bool positive;

    bool operator==(const BuchiLiteral&) const = default;
};

struct BuchiEdge {
    std::uint32_t target;
    std::vector<BuchiLiteral> constraint; // conjunction
};

/// Generalised Büchi automaton with constraint-labelled edges. State
/// `initial` is a pseudo-state that is never re-entered.
struct BuchiAutomaton {
    std::vector<Formula> atoms; // Event or Fluent atoms
    std::uint32_t initial = 0;
    std::vector<std::vector<BuchiEdge>> edges;
    std::vector<std::vector<bool>> accepting; // one set per Until obligation

    std::size_t num_states() const { return edges.size(); }
    /// Counter construction to a single acceptance set.
    BuchiAutomaton degeneralize() const;
};

BuchiAutomaton ltl_to_buchi(const Formula& formula);

bool satisfies(const BuchiAutomaton& automaton, const std::vector<BuchiLiteral>& constraint, const Letter& letter);

/// Whether the automaton has an accepting run on the letter lasso.
bool accepts(const BuchiAutomaton& automaton, const LetterLasso& word);

struct Verdict {
    bool holds = true;
    std::vector<EventLabel> prefix;
    std::vector<EventLabel> cycle;
    /// LTS states visited by the lasso: prefix.size() + cycle.size() + 1
    /// entries, the last equal to the one at index prefix.size().
    std::vector<StateId> states;
};

struct CheckOptions {
    std::size_t max_product_states = 5'000'000;
};

struct CheckStats {
    std::size_t product_states = 0;
    std::size_t automaton_states = 0;
};

/// Searches lts ⊗ tracker ⊗ automaton(¬formula) for an accepting lasso.
/// A returned violation has been re-checked against eval_on_lasso.
Verdict check(const Lts& lts, std::span<const FluentDef> fluents, const Formula& formula,
              const CheckOptions& options = {}, CheckStats* stats = nullptr);

/// Whether prefix·cycle^ω is a trace of the LTS from its initial state.
bool replays(const Lts& lts, std::span<const EventLabel> prefix, std::span<const EventLabel> cycle);

} // namespace flowcheck
