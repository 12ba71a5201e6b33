#include "flowcheck/workflow.hpp"

#include <algorithm>
#include <deque>

namespace flowcheck {

namespace {

struct Collector {
    std::vector<Diagnostic>& out;
    std::string qualifier;

    void report(const std::string& kind, const std::string& node, const std::string& message) {
        out.push_back(Diagnostic{Severity::Error, kind, qualifier + node, message});
    }
};

std::set<NodeId> reach(const Net& net, const NodeId& from, bool forward) {
    std::set<NodeId> seen{from};
    std::deque<NodeId> queue{from};
    while (!queue.empty()) {
        const NodeId node = queue.front();
        queue.pop_front();
        for (const auto& arc : net.flows) {
            const NodeId* next = nullptr;
            if (forward && arc.from == node)
                next = &arc.to;
            else if (!forward && arc.to == node)
                next = &arc.from;
            if (next && seen.insert(*next).second)
                queue.push_back(*next);
        }
    }
    return seen;
}

void validate_net(const WorkflowSpec& spec, const Net& net, bool is_root, std::vector<Diagnostic>& out) {
    Collector diag{out, is_root ? std::string() : net.id + "."};

    const Condition* input = net.input_condition();
    const Condition* output = net.output_condition();
    if (!input)
        diag.report("MissingInputCondition", net.id, "net has no input condition");
    if (!output)
        diag.report("MissingOutputCondition", net.id, "net has no output condition");
    for (const auto& c : net.conditions) {
        if (input && c.kind == ConditionKind::Input && &c != input)
            diag.report("DuplicateInputCondition", c.id, "net has more than one input condition");
        if (output && c.kind == ConditionKind::Output && &c != output)
            diag.report("DuplicateOutputCondition", c.id, "net has more than one output condition");
    }

    for (const auto& arc : net.flows) {
        if (!net.contains(arc.from) || !net.contains(arc.to)) {
            diag.report("DanglingArc", net.contains(arc.from) ? arc.from : arc.to,
                        "arc " + arc.from + " -> " + arc.to + " references an unknown node");
            continue;
        }
        const bool from_task = net.find_task(arc.from) != nullptr;
        const bool to_task = net.find_task(arc.to) != nullptr;
        if (from_task && to_task)
            diag.report("TaskToTaskArc", arc.from, "arc " + arc.from + " -> " + arc.to + " is not normalized");
        else if (!from_task && !to_task)
            diag.report("ConditionToConditionArc", arc.from,
                        "arc " + arc.from + " -> " + arc.to + " connects two conditions");
        if (input && arc.to == input->id)
            diag.report("InputHasIncoming", input->id, "input condition has an incoming arc from " + arc.from);
        if (output && arc.from == output->id)
            diag.report("OutputHasOutgoing", output->id, "output condition has an outgoing arc to " + arc.to);
    }

    std::set<NodeId> forward, backward;
    if (input)
        forward = reach(net, input->id, true);
    if (output)
        backward = reach(net, output->id, false);
    auto on_path = [&](const NodeId& id) { return forward.contains(id) && backward.contains(id); };

    for (const auto& c : net.conditions)
        if (input && output && !on_path(c.id))
            diag.report("Unreachable", c.id, "condition is not on a path from input to output");

    for (const auto& task : net.tasks) {
        if (input && output && !on_path(task.id))
            diag.report("Unreachable", task.id, "task is not on a path from input to output");
        if (net.predecessors(task.id).empty())
            diag.report("NoInput", task.id, "task has no incoming arc");
        if (net.successors(task.id).empty())
            diag.report("NoOutput", task.id, "task has no outgoing arc");
        for (const auto& target : task.cancel_set)
            if (!net.contains(target))
                diag.report("DanglingCancel", task.id, "cancel set names unknown node '" + target + "'");
        if (task.mi) {
            const auto& mi = *task.mi;
            if (mi.min < 1 || mi.min > mi.max || mi.threshold < 1 || mi.threshold > mi.max)
                diag.report("InvalidMiParams", task.id,
                            "requires 1 <= min <= max and 1 <= threshold <= max");
        }
        if (task.subnet) {
            if (!spec.net(*task.subnet))
                diag.report("DanglingSubnet", task.id, "subnet '" + *task.subnet + "' does not exist");
            if (task.mi)
                diag.report("CompositeMultiInstance", task.id,
                            "composite tasks cannot have multiple instances");
        }
    }
}

// Depth-first search over the "net contains composite task referring to net"
// relation; every back edge is a recursive composition.
void find_recursion(const WorkflowSpec& spec, const Net& net, std::vector<std::string>& stack,
                    std::set<std::string>& done, std::vector<Diagnostic>& out) {
    stack.push_back(net.id);
    for (const auto& task : net.tasks) {
        if (!task.subnet)
            continue;
        const Net* sub = spec.net(*task.subnet);
        if (!sub)
            continue;
        auto on_stack = std::find(stack.begin(), stack.end(), sub->id);
        if (on_stack != stack.end()) {
            std::string cycle;
            for (auto it = on_stack; it != stack.end(); ++it)
                cycle += *it + " -> ";
            cycle += sub->id;
            const std::string node = net.id == spec.root.id ? task.id : net.id + "." + task.id;
            out.push_back(Diagnostic{Severity::Error, "RecursiveComposition", node,
                                     "composite task closes the cycle " + cycle});
            continue;
        }
        if (!done.contains(sub->id))
            find_recursion(spec, *sub, stack, done, out);
    }
    stack.pop_back();
    done.insert(net.id);
}

} // namespace

std::vector<Diagnostic> validate(const WorkflowSpec& spec) {
    std::vector<Diagnostic> out;
    validate_net(spec, spec.root, true, out);
    for (const auto& [ref, net] : spec.subnets)
        validate_net(spec, net, false, out);

    std::vector<std::string> stack;
    std::set<std::string> done;
    find_recursion(spec, spec.root, stack, done, out);
    for (const auto& [ref, net] : spec.subnets)
        if (!done.contains(net.id))
            find_recursion(spec, net, stack, done, out);
    return out;
}

} // namespace flowcheck
