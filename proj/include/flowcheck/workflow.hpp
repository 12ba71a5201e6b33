#pragma once

// Control-flow subset of YAWL: nets of tasks and conditions, join/split
// codes, cancellation sets, static multiple-instance parameters and
// composite tasks refined by subnets.

#include "flowcheck/error.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowcheck {

using NodeId = std::string;

enum class Gate { And, Xor, Or };

enum class ConditionKind { Input, Output, Plain, Implicit };

const char* to_string(Gate gate);
const char* to_string(ConditionKind kind);

struct Condition {
    NodeId id;
    ConditionKind kind = ConditionKind::Plain;

    bool operator==(const Condition&) const = default;
};

/// Static-creation multiple-instance parameters: 1 <= min <= max, 1 <= threshold <= max.
struct MiParams {
    int min = 1;
    int max = 1;
    int threshold = 1;

    bool operator==(const MiParams&) const = default;
};

struct Task {
    NodeId id;
    Gate join = Gate::Xor;
    Gate split = Gate::And;
    std::vector<NodeId> cancel_set;
    std::optional<MiParams> mi;
    std::optional<std::string> subnet;

    bool operator==(const Task&) const = default;
};

struct Arc {
    NodeId from;
    NodeId to;

    bool operator==(const Arc&) const = default;
    auto operator<=>(const Arc&) const = default;
};

struct Net {
    std::string id;
    std::vector<Condition> conditions;
    std::vector<Task> tasks;
    std::vector<Arc> flows;

    bool operator==(const Net&) const = default;

    const Task* find_task(std::string_view node) const;
    const Condition* find_condition(std::string_view node) const;
    bool contains(std::string_view node) const { return find_task(node) || find_condition(node); }
    const Condition* input_condition() const;
    const Condition* output_condition() const;
    std::vector<NodeId> predecessors(std::string_view node) const;
    std::vector<NodeId> successors(std::string_view node) const;
};

struct WorkflowSpec {
    Net root;
    std::map<std::string, Net> subnets;

    bool operator==(const WorkflowSpec&) const = default;

    const Net* net(std::string_view ref) const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string kind;
    std::string node;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

const char* to_string(Severity severity);

/// Reserved event labels; never produced by a workflow task.
inline constexpr std::string_view kTerminate = "_terminate";
inline constexpr std::string_view kDeadlock = "_deadlock";

bool is_valid_local_id(std::string_view id);

/// Parses the control-flow part of a YAWL specification document.
/// Unknown elements (data, resources, layout) are skipped.
WorkflowSpec parse_yawl(std::string_view xml);
WorkflowSpec load_yawl_file(const std::string& path);

/// Serialises the control-flow subset back to YAWL XML. Implicit conditions
/// are written as ordinary conditions so cancel sets naming them survive.
std::string emit_yawl(const WorkflowSpec& spec);

/// Replaces every task->task arc (a,b) by a -> c_a_b -> b.
WorkflowSpec normalize(WorkflowSpec spec);

std::vector<Diagnostic> validate(const WorkflowSpec& spec);

/// One visit per net instance reachable from the root: the root at prefix ""
/// and each composite task's subnet at prefix "<task-path>.".
struct NetInstance {
    const Net& net;
    std::string prefix;
    int depth = 0;
};
void for_each_net_instance(const WorkflowSpec& spec, const std::function<void(const NetInstance&)>& visit);

std::set<EventLabel> event_alphabet(const WorkflowSpec& spec);

} // namespace flowcheck
