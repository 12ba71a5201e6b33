#pragma once

// Test-side reference implementations, written against the documented
// semantics and sharing no code with the library's encoder or checker.

#include "flowcheck/encoder.hpp"
#include "flowcheck/fltl.hpp"
#include "flowcheck/workflow.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace testsupport {

using Trace = std::vector<std::string>;

/// All event sequences of length <= max_length executable from the initial
/// marking, interpreting the workflow directly (no compiled net). Final and
/// stuck configurations repeat `_terminate` / `_deadlock`. Throws
/// std::runtime_error when a condition would exceed `bound` tokens.
std::set<Trace> reference_traces(const flowcheck::WorkflowSpec& spec, int bound, std::size_t max_length);

/// Number of distinct configurations reachable in the reference interpretation.
std::size_t reference_state_count(const flowcheck::WorkflowSpec& spec, int bound);

std::set<Trace> lts_traces(const flowcheck::Lts& lts, std::size_t max_length);

struct EventLasso {
    Trace prefix;
    Trace cycle;
};

/// Every infinite trace of an LTS that is acyclic apart from self-loops on
/// its sink states, as lassos. nullopt if the LTS has another cycle or more
/// than `limit` maximal paths.
std::optional<std::vector<EventLasso>> dag_lassos(const flowcheck::Lts& lts, std::size_t limit);

/// Truth of the formula on prefix.cycle^ω, from the textbook definitions
/// (bounded look-ahead on the unrolled word).
bool oracle_holds(const flowcheck::Formula& formula, const std::vector<flowcheck::FluentDef>& fluents,
                  const EventLasso& word);

/// Checks every lasso; returns the first falsifying one, if any.
std::optional<EventLasso> oracle_counterexample(const flowcheck::Formula& formula,
                                                const std::vector<flowcheck::FluentDef>& fluents,
                                                const std::vector<EventLasso>& lassos);

} // namespace testsupport
