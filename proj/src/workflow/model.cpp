#include "flowcheck/workflow.hpp"

#include <algorithm>
#include <cctype>

namespace flowcheck {

const char* to_string(ParseErrorKind kind) {
    switch (kind) {
    case ParseErrorKind::MalformedXml: return "MalformedXml";
    case ParseErrorKind::MissingInputCondition: return "MissingInputCondition";
    case ParseErrorKind::MissingOutputCondition: return "MissingOutputCondition";
    case ParseErrorKind::DanglingReference: return "DanglingReference";
    case ParseErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ParseErrorKind::InvalidId: return "InvalidId";
    case ParseErrorKind::DuplicateId: return "DuplicateId";
    }
    return "ParseError";
}

namespace {
std::string join_labels(const std::vector<EventLabel>& labels) {
    std::string out;
    for (const auto& label : labels) {
        if (!out.empty())
            out += ' ';
        out += label;
    }
    return out;
}
} // namespace

BoundExceeded::BoundExceeded(std::string place, int bound, std::vector<EventLabel> witness)
    : Error("BoundExceeded: place " + place + " exceeds bound " + std::to_string(bound) + " after [" +
            join_labels(witness) + "]"),
      place_(std::move(place)), bound_(bound), witness_(std::move(witness)) {}

const char* to_string(Gate gate) {
    switch (gate) {
    case Gate::And: return "and";
    case Gate::Xor: return "xor";
    case Gate::Or: return "or";
    }
    return "?";
}

const char* to_string(ConditionKind kind) {
    switch (kind) {
    case ConditionKind::Input: return "input";
    case ConditionKind::Output: return "output";
    case ConditionKind::Plain: return "plain";
    case ConditionKind::Implicit: return "implicit";
    }
    return "?";
}

const char* to_string(Severity severity) {
    return severity == Severity::Error ? "ERROR" : "WARNING";
}

bool is_valid_local_id(std::string_view id) {
    if (id.empty())
        return false;
    return std::none_of(id.begin(), id.end(), [](char c) {
        return c == '.' || std::isspace(static_cast<unsigned char>(c));
    });
}

const Task* Net::find_task(std::string_view node) const {
    auto it = std::find_if(tasks.begin(), tasks.end(), [&](const Task& t) { return t.id == node; });
    return it == tasks.end() ? nullptr : &*it;
}

const Condition* Net::find_condition(std::string_view node) const {
    auto it = std::find_if(conditions.begin(), conditions.end(),
                           [&](const Condition& c) { return c.id == node; });
    return it == conditions.end() ? nullptr : &*it;
}

const Condition* Net::input_condition() const {
    auto it = std::find_if(conditions.begin(), conditions.end(),
                           [](const Condition& c) { return c.kind == ConditionKind::Input; });
    return it == conditions.end() ? nullptr : &*it;
}

const Condition* Net::output_condition() const {
    auto it = std::find_if(conditions.begin(), conditions.end(),
                           [](const Condition& c) { return c.kind == ConditionKind::Output; });
    return it == conditions.end() ? nullptr : &*it;
}

std::vector<NodeId> Net::predecessors(std::string_view node) const {
    std::vector<NodeId> out;
    for (const auto& arc : flows)
        if (arc.to == node)
            out.push_back(arc.from);
    return out;
}

std::vector<NodeId> Net::successors(std::string_view node) const {
    std::vector<NodeId> out;
    for (const auto& arc : flows)
        if (arc.from == node)
            out.push_back(arc.to);
    return out;
}

const Net* WorkflowSpec::net(std::string_view ref) const {
    auto it = subnets.find(std::string(ref));
    return it == subnets.end() ? nullptr : &it->second;
}

namespace {

void visit_instances(const WorkflowSpec& spec, const Net& net, const std::string& prefix, int depth,
                     std::vector<std::string>& stack,
                     const std::function<void(const NetInstance&)>& visit) {
    visit(NetInstance{net, prefix, depth});
    for (const auto& task : net.tasks) {
        if (!task.subnet)
            continue;
        const Net* sub = spec.net(*task.subnet);
        if (!sub || std::find(stack.begin(), stack.end(), *task.subnet) != stack.end())
            continue; // unresolved or recursive; reported by validate()
        stack.push_back(*task.subnet);
        visit_instances(spec, *sub, prefix + task.id + ".", depth + 1, stack, visit);
        stack.pop_back();
    }
}

} // namespace

void for_each_net_instance(const WorkflowSpec& spec, const std::function<void(const NetInstance&)>& visit) {
    std::vector<std::string> stack{spec.root.id};
    visit_instances(spec, spec.root, "", 0, stack, visit);
}

std::set<EventLabel> event_alphabet(const WorkflowSpec& spec) {
    std::set<EventLabel> out;
    for_each_net_instance(spec, [&](const NetInstance& inst) {
        for (const auto& task : inst.net.tasks) {
            const std::string path = inst.prefix + task.id;
            out.insert(path + ".start");
            out.insert(path + ".end");
            if (task.mi) {
                out.insert(path + ".inst.start");
                out.insert(path + ".inst.end");
            }
        }
    });
    out.insert(std::string(kTerminate));
    out.insert(std::string(kDeadlock));
    return out;
}

} // namespace flowcheck
