#include "flowcheck/workflow.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace flowcheck {

namespace pt = boost::property_tree;

namespace {

// Element names are matched on their local part so that prefixed documents
// (yawl:task) load the same as default-namespace ones.
std::string_view local_name(std::string_view name) {
    auto colon = name.rfind(':');
    return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

bool is_element(const std::string& key) {
    return key != "<xmlattr>" && key != "<xmlcomment>" && key != "<xmltext>";
}

std::optional<std::string> attribute(const pt::ptree& node, std::string_view name) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs)
        return std::nullopt;
    for (const auto& [key, value] : *attrs)
        if (local_name(key) == name)
            return value.data();
    return std::nullopt;
}

std::vector<const pt::ptree*> children(const pt::ptree& node, std::string_view name) {
    std::vector<const pt::ptree*> out;
    for (const auto& [key, child] : node)
        if (is_element(key) && local_name(key) == name)
            out.push_back(&child);
    return out;
}

const pt::ptree* child(const pt::ptree& node, std::string_view name) {
    for (const auto& [key, value] : node)
        if (is_element(key) && local_name(key) == name)
            return &value;
    return nullptr;
}

std::string trimmed(std::string text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

void collect_decompositions(const pt::ptree& node, std::vector<const pt::ptree*>& out) {
    for (const auto& [key, value] : node) {
        if (!is_element(key))
            continue;
        if (local_name(key) == "decomposition")
            out.push_back(&value);
        else
            collect_decompositions(value, out);
    }
}

std::string required_id(const pt::ptree& node, std::string_view what) {
    auto id = attribute(node, "id");
    if (!id || id->empty())
        throw ParseError(ParseErrorKind::MalformedXml, std::string(what) + " without id attribute");
    return *id;
}

void check_local_id(const std::string& id, const std::string& net) {
    if (!is_valid_local_id(id))
        throw ParseError(ParseErrorKind::InvalidId,
                         "identifier '" + id + "' in net '" + net + "' contains '.' or whitespace");
}

Gate parse_gate(const pt::ptree& task, std::string_view element, Gate fallback, const std::string& task_id) {
    const pt::ptree* gate = child(task, element);
    if (!gate)
        return fallback;
    auto code = attribute(*gate, "code");
    if (!code)
        return fallback;
    if (*code == "and")
        return Gate::And;
    if (*code == "xor")
        return Gate::Xor;
    if (*code == "or")
        return Gate::Or;
    throw ParseError(ParseErrorKind::MalformedXml,
                     "task '" + task_id + "' has unknown " + std::string(element) + " code '" + *code + "'");
}

int parse_mi_number(const pt::ptree& task, std::string_view element, int fallback, const std::string& task_id) {
    const pt::ptree* node = child(task, element);
    if (!node)
        return fallback;
    const std::string text = trimmed(node->data());
    try {
        std::size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used == text.size())
            return value;
    } catch (const std::exception&) {
    }
    throw ParseError(ParseErrorKind::UnsupportedFeature, "task '" + task_id + "' has non-literal MI " +
                                                             std::string(element) + " '" + text + "'");
}

struct RawNet {
    Net net;
    bool is_root = false;
    std::vector<std::pair<std::string, std::string>> subnet_refs; // task -> decomposition id
};

RawNet parse_net(const pt::ptree& decomposition, const std::string& id) {
    RawNet raw;
    raw.net.id = id;
    raw.is_root = attribute(decomposition, "isRootNet").value_or("false") == "true";
    const pt::ptree* elements = child(decomposition, "processControlElements");

    std::set<std::string> seen;
    auto declare = [&](const std::string& node_id) {
        check_local_id(node_id, id);
        if (!seen.insert(node_id).second)
            throw ParseError(ParseErrorKind::DuplicateId, "node '" + node_id + "' declared twice in net '" + id + "'");
    };

    for (const auto& [key, element] : *elements) {
        if (!is_element(key))
            continue;
        const auto name = local_name(key);
        const bool is_condition = name == "inputCondition" || name == "outputCondition" || name == "condition";
        if (!is_condition && name != "task")
            continue;

        const std::string node_id = required_id(element, name);
        declare(node_id);
        for (const pt::ptree* flow : children(element, "flowsInto"))
            for (const pt::ptree* next : children(*flow, "nextElementRef"))
                raw.net.flows.push_back(Arc{node_id, required_id(*next, "nextElementRef")});

        if (is_condition) {
            ConditionKind kind = ConditionKind::Plain;
            if (name == "inputCondition") {
                if (raw.net.input_condition())
                    throw ParseError(ParseErrorKind::DuplicateId, "net '" + id + "' has two input conditions");
                kind = ConditionKind::Input;
            } else if (name == "outputCondition") {
                if (raw.net.output_condition())
                    throw ParseError(ParseErrorKind::DuplicateId, "net '" + id + "' has two output conditions");
                kind = ConditionKind::Output;
            }
            raw.net.conditions.push_back(Condition{node_id, kind});
            continue;
        }

        Task task;
        task.id = node_id;
        task.join = parse_gate(element, "join", Gate::Xor, node_id);
        task.split = parse_gate(element, "split", Gate::And, node_id);
        for (const pt::ptree* removes : children(element, "removesTokens"))
            task.cancel_set.push_back(required_id(*removes, "removesTokens"));

        const std::string type = attribute(element, "type").value_or("");
        const bool mi = type.find("MultipleInstance") != std::string::npos || child(element, "minimum") ||
                        child(element, "maximum");
        if (mi) {
            if (type.find("Composite") != std::string::npos)
                throw ParseError(ParseErrorKind::UnsupportedFeature,
                                 "task '" + node_id + "' is a multiple-instance composite task");
            MiParams params;
            params.min = parse_mi_number(element, "minimum", 1, node_id);
            params.max = parse_mi_number(element, "maximum", params.min, node_id);
            params.threshold = parse_mi_number(element, "threshold", params.max, node_id);
            if (const pt::ptree* mode = child(element, "creationMode")) {
                if (attribute(*mode, "code").value_or("static") != "static")
                    throw ParseError(ParseErrorKind::UnsupportedFeature,
                                     "task '" + node_id + "' uses dynamic instance creation");
            }
            task.mi = params;
        }
        if (const pt::ptree* decomposes = child(element, "decomposesTo"))
            raw.subnet_refs.emplace_back(node_id, required_id(*decomposes, "decomposesTo"));
        raw.net.tasks.push_back(std::move(task));
    }

    if (!raw.net.input_condition())
        throw ParseError(ParseErrorKind::MissingInputCondition, "net '" + id + "' has no input condition");
    if (!raw.net.output_condition())
        throw ParseError(ParseErrorKind::MissingOutputCondition, "net '" + id + "' has no output condition");

    std::sort(raw.net.flows.begin(), raw.net.flows.end());
    for (const auto& arc : raw.net.flows)
        if (!seen.contains(arc.to))
            throw ParseError(ParseErrorKind::DanglingReference,
                             "flow from '" + arc.from + "' to unknown node '" + arc.to + "' in net '" + id + "'");
    for (const auto& task : raw.net.tasks)
        for (const auto& target : task.cancel_set)
            if (!seen.contains(target))
                throw ParseError(ParseErrorKind::DanglingReference, "task '" + task.id +
                                                                        "' cancels unknown node '" + target +
                                                                        "' in net '" + id + "'");
    return raw;
}

} // namespace

WorkflowSpec parse_yawl(std::string_view xml) {
    pt::ptree doc;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(ParseErrorKind::MalformedXml, e.message() + " at line " + std::to_string(e.line()));
    }

    std::vector<const pt::ptree*> decompositions;
    collect_decompositions(doc, decompositions);

    std::set<std::string> all_ids;
    std::vector<RawNet> nets;
    for (const pt::ptree* decomposition : decompositions) {
        const std::string id = required_id(*decomposition, "decomposition");
        if (!all_ids.insert(id).second)
            throw ParseError(ParseErrorKind::DuplicateId, "decomposition '" + id + "' declared twice");
        if (child(*decomposition, "processControlElements"))
            nets.push_back(parse_net(*decomposition, id));
    }
    if (nets.empty())
        throw ParseError(ParseErrorKind::MalformedXml, "document contains no net decomposition");

    std::set<std::string> net_ids;
    for (const auto& raw : nets)
        net_ids.insert(raw.net.id);

    // Tasks decomposing to non-net decompositions (web-service gateways and
    // the like) are atomic.
    for (auto& raw : nets) {
        for (const auto& [task_id, ref] : raw.subnet_refs) {
            if (!all_ids.contains(ref))
                throw ParseError(ParseErrorKind::DanglingReference,
                                 "task '" + task_id + "' decomposes to unknown '" + ref + "'");
            if (!net_ids.contains(ref))
                continue;
            auto& task = *std::find_if(raw.net.tasks.begin(), raw.net.tasks.end(),
                                       [&](const Task& t) { return t.id == task_id; });
            if (task.mi)
                throw ParseError(ParseErrorKind::UnsupportedFeature,
                                 "task '" + task_id + "' is a multiple-instance composite task");
            task.subnet = ref;
        }
    }

    auto root_it = std::find_if(nets.begin(), nets.end(), [](const RawNet& n) { return n.is_root; });
    if (root_it == nets.end())
        root_it = nets.begin();

    WorkflowSpec spec;
    spec.root = root_it->net;
    for (auto& raw : nets)
        if (&raw != &*root_it)
            spec.subnets.emplace(raw.net.id, std::move(raw.net));
    return spec;
}

WorkflowSpec load_yawl_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_yawl(buffer.str());
}

namespace {

void emit_net(pt::ptree& spec_node, const Net& net, bool root) {
    pt::ptree& decomposition = spec_node.add("decomposition", "");
    decomposition.put("<xmlattr>.id", net.id);
    if (root)
        decomposition.put("<xmlattr>.isRootNet", "true");
    decomposition.put("<xmlattr>.xsi:type", "NetFactsType");
    pt::ptree& elements = decomposition.add("processControlElements", "");

    auto add_flows = [&](pt::ptree& element, const NodeId& id) {
        for (const auto& arc : net.flows) {
            if (arc.from != id)
                continue;
            pt::ptree& flow = element.add("flowsInto", "");
            flow.add("nextElementRef.<xmlattr>.id", arc.to);
        }
    };

    // YAWL orders the input condition first and the output condition last.
    auto emit_condition = [&](const Condition& c) {
        const char* tag = c.kind == ConditionKind::Input ? "inputCondition"
                          : c.kind == ConditionKind::Output ? "outputCondition"
                                                            : "condition";
        pt::ptree& element = elements.add(tag, "");
        element.put("<xmlattr>.id", c.id);
        add_flows(element, c.id);
    };
    for (const auto& c : net.conditions)
        if (c.kind == ConditionKind::Input)
            emit_condition(c);
    for (const auto& task : net.tasks) {
        pt::ptree& element = elements.add("task", "");
        element.put("<xmlattr>.id", task.id);
        if (task.mi)
            element.put("<xmlattr>.xsi:type", "MultipleInstanceExternalTaskFactsType");
        add_flows(element, task.id);
        element.add("join.<xmlattr>.code", to_string(task.join));
        element.add("split.<xmlattr>.code", to_string(task.split));
        for (const auto& removed : task.cancel_set)
            element.add("removesTokens", "").put("<xmlattr>.id", removed);
        if (task.mi) {
            element.add("minimum", std::to_string(task.mi->min));
            element.add("maximum", std::to_string(task.mi->max));
            element.add("threshold", std::to_string(task.mi->threshold));
            element.add("creationMode.<xmlattr>.code", "static");
        }
        if (task.subnet)
            element.add("decomposesTo.<xmlattr>.id", *task.subnet);
    }
    for (const auto& c : net.conditions)
        if (c.kind == ConditionKind::Plain || c.kind == ConditionKind::Implicit)
            emit_condition(c);
    for (const auto& c : net.conditions)
        if (c.kind == ConditionKind::Output)
            emit_condition(c);
}

} // namespace

std::string emit_yawl(const WorkflowSpec& spec) {
    pt::ptree doc;
    pt::ptree& set = doc.add("specificationSet", "");
    set.put("<xmlattr>.xmlns", "http://www.yawlfoundation.org/yawlschema");
    set.put("<xmlattr>.xmlns:xsi", "http://www.w3.org/2001/XMLSchema-instance");
    set.put("<xmlattr>.version", "2.2");
    pt::ptree& specification = set.add("specification", "");
    specification.put("<xmlattr>.uri", spec.root.id);
    emit_net(specification, spec.root, true);
    for (const auto& [ref, net] : spec.subnets)
        emit_net(specification, net, false);

    std::ostringstream out;
    pt::write_xml(out, doc, pt::xml_writer_make_settings<std::string>(' ', 2));
    return out.str();
}

} // namespace flowcheck
