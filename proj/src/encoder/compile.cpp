#include "flowcheck/encoder.hpp"

#include <algorithm>
#include <map>

namespace flowcheck {

std::optional<PlaceId> CompiledNet::find_place(std::string_view id) const {
    for (PlaceId p = 0; p < places.size(); ++p)
        if (places[p].id == id)
            return p;
    return std::nullopt;
}

namespace {

constexpr std::size_t kMaxOrFanout = 16;

class Compiler {
public:
    Compiler(const WorkflowSpec& spec, int bound) : spec_(spec) { net_.bound = bound; }

    CompiledNet run() {
        for_each_net_instance(spec_, [&](const NetInstance& inst) { declare_places(inst); });
        for_each_net_instance(spec_, [&](const NetInstance& inst) { emit_transitions(inst); });

        const PlaceId input = condition_place(spec_.root.input_condition()->id);
        net_.final_place = condition_place(spec_.root.output_condition()->id);
        net_.initial.assign(net_.places.size(), 0);
        net_.initial[input] = 1;
        const auto alphabet = event_alphabet(spec_);
        net_.alphabet.assign(alphabet.begin(), alphabet.end());
        return std::move(net_);
    }

private:
    PlaceId add_place(std::string id, PlaceOrigin origin, std::string node, int capacity) {
        const auto p = static_cast<PlaceId>(net_.places.size());
        by_name_.emplace(id, p);
        net_.places.push_back(Place{std::move(id), origin, std::move(node), capacity});
        return p;
    }

    PlaceId condition_place(const std::string& qualified) const { return by_name_.at(qualified); }
    PlaceId named(const std::string& id) const { return by_name_.at(id); }

    void declare_places(const NetInstance& inst) {
        for (const auto& c : inst.net.conditions) {
            const std::string q = inst.prefix + c.id;
            add_place(q, PlaceOrigin::Condition, q, net_.bound);
        }
        for (const auto& task : inst.net.tasks) {
            const std::string q = inst.prefix + task.id;
            if (task.mi) {
                const int cap = net_.bound * task.mi->max;
                add_place("active:" + q, PlaceOrigin::MiActive, q, cap);
                add_place("done:" + q, PlaceOrigin::MiCompleted, q, cap);
            } else {
                add_place("busy:" + q, PlaceOrigin::Busy, q, net_.bound);
            }
        }
    }

    // Places removed when the node `local` of this instance is cancelled. A
    // cancelled composite task also loses everything inside its subnet.
    void cancel_places(const NetInstance& inst, const NodeId& local, std::vector<PlaceId>& out) const {
        const std::string q = inst.prefix + local;
        if (inst.net.find_condition(local)) {
            out.push_back(condition_place(q));
            return;
        }
        const Task* task = inst.net.find_task(local);
        if (!task)
            return;
        if (task->mi) {
            out.push_back(named("active:" + q));
            out.push_back(named("done:" + q));
        } else {
            out.push_back(named("busy:" + q));
        }
        if (task->subnet) {
            const std::string inner = q + ".";
            for (PlaceId p = 0; p < net_.places.size(); ++p)
                if (net_.places[p].node.starts_with(inner))
                    out.push_back(p);
        }
    }

    static std::vector<std::vector<PlaceId>> variants(Gate gate, const std::vector<PlaceId>& places,
                                                      const std::string& task) {
        std::vector<std::vector<PlaceId>> out;
        switch (gate) {
        case Gate::And:
            out.push_back(places);
            break;
        case Gate::Xor:
            for (PlaceId p : places)
                out.push_back({p});
            break;
        case Gate::Or: {
            if (places.size() > kMaxOrFanout)
                throw Error("OR gate of task '" + task + "' has more than " + std::to_string(kMaxOrFanout) +
                            " branches");
            const std::size_t n = places.size();
            for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
                std::vector<PlaceId> subset;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (std::size_t{1} << i))
                        subset.push_back(places[i]);
                out.push_back(std::move(subset));
            }
            break;
        }
        }
        return out;
    }

    static std::vector<PlaceCount> ones(const std::vector<PlaceId>& places) {
        std::vector<PlaceCount> out;
        for (PlaceId p : places)
            out.emplace_back(p, 1);
        return out;
    }

    void emit_transitions(const NetInstance& inst) {
        for (const auto& task : inst.net.tasks) {
            const std::string q = inst.prefix + task.id;
            std::vector<PlaceId> inputs, outputs;
            for (const auto& pred : inst.net.predecessors(task.id))
                if (inst.net.find_condition(pred))
                    inputs.push_back(condition_place(inst.prefix + pred));
            for (const auto& succ : inst.net.successors(task.id))
                if (inst.net.find_condition(succ))
                    outputs.push_back(condition_place(inst.prefix + succ));

            std::vector<PlaceId> resets;
            for (const auto& cancelled : task.cancel_set)
                cancel_places(inst, cancelled, resets);

            std::optional<std::size_t> or_join;
            if (task.join == Gate::Or) {
                or_join = net_.or_joins.size();
                net_.or_joins.push_back(OrJoin{q, inputs, {}});
            }

            // start
            for (const auto& consumed : variants(task.join, inputs, q)) {
                std::vector<std::vector<PlaceCount>> products;
                if (task.mi) {
                    for (int n = task.mi->min; n <= task.mi->max; ++n)
                        products.push_back({{named("active:" + q), static_cast<std::uint16_t>(n)}});
                } else {
                    std::vector<PlaceCount> produce{{named("busy:" + q), 1}};
                    if (task.subnet) {
                        const Net* sub = spec_.net(*task.subnet);
                        produce.emplace_back(condition_place(q + "." + sub->input_condition()->id), 1);
                    }
                    products.push_back(std::move(produce));
                }
                for (auto& produce : products) {
                    if (or_join)
                        net_.or_joins[*or_join].starts.push_back(net_.transitions.size());
                    net_.transitions.push_back(NetTransition{q + ".start", ones(consumed), std::move(produce), {}, or_join});
                }
            }

            if (task.mi) {
                net_.transitions.push_back(NetTransition{
                    q + ".inst.end", {{named("active:" + q), 1}}, {{named("done:" + q), 1}}, {}, std::nullopt});
            }

            // end
            std::vector<PlaceCount> consume;
            std::vector<PlaceId> end_resets = resets;
            if (task.mi) {
                consume.emplace_back(named("done:" + q), static_cast<std::uint16_t>(task.mi->threshold));
                end_resets.push_back(named("active:" + q));
                end_resets.push_back(named("done:" + q));
            } else {
                consume.emplace_back(named("busy:" + q), 1);
                if (task.subnet) {
                    const Net* sub = spec_.net(*task.subnet);
                    consume.emplace_back(condition_place(q + "." + sub->output_condition()->id), 1);
                }
            }
            std::sort(end_resets.begin(), end_resets.end());
            end_resets.erase(std::unique(end_resets.begin(), end_resets.end()), end_resets.end());
            for (const auto& produced : variants(task.split, outputs, q))
                net_.transitions.push_back(NetTransition{q + ".end", consume, ones(produced), end_resets, std::nullopt});
        }
    }

    const WorkflowSpec& spec_;
    CompiledNet net_;
    std::map<std::string, PlaceId> by_name_;
};

} // namespace

CompiledNet compile(const WorkflowSpec& spec, int bound) {
    if (bound < 1)
        throw Error("bound must be at least 1");
    return Compiler(spec, bound).run();
}

} // namespace flowcheck
