#include "flowcheck/workflow.hpp"

#include <algorithm>

namespace flowcheck {

namespace {

void normalize_net(Net& net) {
    std::vector<Arc> flows;
    flows.reserve(net.flows.size());
    for (const auto& arc : net.flows) {
        if (!net.find_task(arc.from) || !net.find_task(arc.to)) {
            flows.push_back(arc);
            continue;
        }
        std::string id = "c_" + arc.from + "_" + arc.to;
        for (int suffix = 2; net.contains(id); ++suffix)
            id = "c_" + arc.from + "_" + arc.to + "_" + std::to_string(suffix);
        net.conditions.push_back(Condition{id, ConditionKind::Implicit});
        flows.push_back(Arc{arc.from, id});
        flows.push_back(Arc{id, arc.to});
    }
    std::sort(flows.begin(), flows.end());
    net.flows = std::move(flows);
}

} // namespace

WorkflowSpec normalize(WorkflowSpec spec) {
    normalize_net(spec.root);
    for (auto& [ref, net] : spec.subnets)
        normalize_net(net);
    return spec;
}

} // namespace flowcheck
