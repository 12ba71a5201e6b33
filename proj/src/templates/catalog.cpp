#include "flowcheck/templates.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

namespace flowcheck {

namespace pt = boost::property_tree;

CatalogError::CatalogError(Kind kind, const std::string& message)
    : Error([&] {
          switch (kind) {
          case Kind::Syntax: return "CatalogSyntaxError: " + message;
          case Kind::DuplicateTemplateId: return "DuplicateTemplateId: " + message;
          case Kind::UnknownTemplate: return "UnknownTemplate: " + message;
          case Kind::MissingBinding: return "MissingBinding: " + message;
          case Kind::UnknownName: return "UnknownName: " + message;
          }
          return message;
      }()),
      kind_(kind) {}

const Template* Catalog::find(std::string_view id) const {
    auto it = std::find_if(templates.begin(), templates.end(), [&](const Template& t) { return t.id == id; });
    return it == templates.end() ? nullptr : &*it;
}

const Template& Catalog::at(std::string_view id) const {
    if (const Template* t = find(id))
        return *t;
    throw CatalogError(CatalogError::Kind::UnknownTemplate, "no template '" + std::string(id) + "'");
}

namespace {

Template make(std::string id, std::string title, std::string description, std::vector<std::string> params,
              std::string_view skeleton) {
    Template t{std::move(id), std::move(title), std::move(description), {}, parse_formula(skeleton)};
    for (auto& p : params)
        t.params.push_back(TemplateParam{std::move(p)});
    return t;
}

void check_placeholders(const Template& t) {
    std::set<std::string> declared;
    for (const auto& p : t.params) {
        if (!is_identifier(p.name))
            throw CatalogError(CatalogError::Kind::Syntax, "template '" + t.id + "' has invalid parameter '" + p.name + "'");
        if (!declared.insert(p.name).second)
            throw CatalogError(CatalogError::Kind::Syntax, "template '" + t.id + "' repeats parameter '" + p.name + "'");
    }
    if (declared != placeholders(t.skeleton))
        throw CatalogError(CatalogError::Kind::Syntax,
                           "template '" + t.id + "': skeleton placeholders and parameters differ");
}

std::string text_of(const pt::ptree& node) {
    std::string text = node.data();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    return text.substr(first, text.find_last_not_of(" \t\r\n") - first + 1);
}

} // namespace

const std::vector<Template>& builtin_templates() {
    static const std::vector<Template> builtins = [] {
        std::vector<Template> out;
        out.push_back(make("existence", "Existence", "A has to be executed at least once.", {"A"}, "<>$A"));
        out.push_back(make("absence", "Absence", "A is never executed.", {"A"}, "[]!$A"));
        out.push_back(make("response", "Response",
                           "Each occurrence of A is followed, sooner or later, by an occurrence of B.", {"A", "B"},
                           "[]($A -> <>$B)"));
        out.push_back(make("precedence", "Precedence", "B can only be executed after A has been executed.",
                           {"A", "B"}, "!$B W $A"));
        out.push_back(make("responded-existence", "Responded existence",
                           "If A is executed, B has to be executed as well, before or after A.", {"A", "B"},
                           "<>$A -> <>$B"));
        out.push_back(make("co-existence", "Co-existence", "If either A or B is executed, the other one is too.",
                           {"A", "B"}, "(<>$A -> <>$B) && (<>$B -> <>$A)"));
        out.push_back(make("chain-response", "Chain response", "Every A is immediately followed by B.", {"A", "B"},
                           "[]($A -> X $B)"));
        out.push_back(make("not-co-existence", "Not co-existence", "A and B are never both executed.", {"A", "B"},
                           "!(<>$A && <>$B)"));
        out.push_back(make("termination", "Termination", "Every execution eventually completes the workflow.", {},
                           "<>_terminate"));
        out.push_back(make("deadlock-freedom", "Deadlock freedom", "No execution reaches a stuck state.", {},
                           "[]!_deadlock"));
        return out;
    }();
    return builtins;
}

Catalog parse_catalog(std::string_view xml, std::string source) {
    Catalog catalog{builtin_templates(), std::move(source)};
    if (xml.find_first_not_of(" \t\r\n") == std::string_view::npos)
        return catalog;

    pt::ptree doc;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw CatalogError(CatalogError::Kind::Syntax, e.message() + " at line " + std::to_string(e.line()));
    }

    const pt::ptree* root = nullptr;
    for (const auto& [key, child] : doc)
        if (key != "<xmlcomment>")
            root = &child;
    if (!root)
        throw CatalogError(CatalogError::Kind::Syntax, "empty catalog document");

    std::set<std::string> seen;
    for (const auto& [key, node] : *root) {
        if (key != "template")
            continue;
        Template t;
        t.id = node.get<std::string>("<xmlattr>.id", "");
        if (t.id.empty())
            throw CatalogError(CatalogError::Kind::Syntax, "template without id");
        if (!seen.insert(t.id).second)
            throw CatalogError(CatalogError::Kind::DuplicateTemplateId, "template '" + t.id + "' is defined twice");
        t.title = node.get<std::string>("<xmlattr>.title", t.id);
        std::optional<std::string> skeleton;
        for (const auto& [field, value] : node) {
            if (field == "description")
                t.description = text_of(value);
            else if (field == "param")
                t.params.push_back(TemplateParam{value.get<std::string>("<xmlattr>.name", ""),
                                                 value.get<std::string>("<xmlattr>.kind", "event-or-fluent")});
            else if (field == "skeleton")
                skeleton = text_of(value);
        }
        if (!skeleton)
            throw CatalogError(CatalogError::Kind::Syntax, "template '" + t.id + "' has no skeleton");
        try {
            t.skeleton = parse_formula(*skeleton);
        } catch (const SyntaxError& e) {
            throw CatalogError(CatalogError::Kind::Syntax, "template '" + t.id + "': " + e.what());
        }
        check_placeholders(t);

        auto existing = std::find_if(catalog.templates.begin(), catalog.templates.end(),
                                     [&](const Template& other) { return other.id == t.id; });
        if (existing != catalog.templates.end())
            *existing = std::move(t);
        else
            catalog.templates.push_back(std::move(t));
    }
    return catalog;
}

Catalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw CatalogError(CatalogError::Kind::Syntax, "cannot open catalog '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_catalog(buffer.str(), path);
}

namespace {

Formula substitute(const Formula& f, const std::map<std::string, Formula>& values) {
    if (f.op == Op::Placeholder)
        return values.at(f.name);
    Formula out{f.op, f.name, {}};
    for (const auto& a : f.args)
        out.args.push_back(substitute(a, values));
    return out;
}

} // namespace

Formula instantiate(const Template& t, const std::map<std::string, std::string>& bindings, const NameScope& scope) {
    std::map<std::string, Formula> values;
    for (const auto& p : t.params) {
        auto it = bindings.find(p.name);
        if (it == bindings.end() || it->second.empty())
            throw CatalogError(CatalogError::Kind::MissingBinding,
                               "template '" + t.id + "' needs a value for parameter " + p.name);
        const std::string& name = it->second;
        Formula atom;
        try {
            atom = parse_formula(name);
        } catch (const SyntaxError&) {
            throw CatalogError(CatalogError::Kind::UnknownName, "'" + name + "' is not an event or fluent");
        }
        if (!atom.is_atom() || (atom.op != Op::Event && atom.op != Op::Fluent))
            throw CatalogError(CatalogError::Kind::UnknownName, "'" + name + "' is not an event or fluent");
        if (!scope.open) {
            const bool known = atom.op == Op::Event ? scope.events.contains(atom.name) : scope.fluents.contains(atom.name);
            if (!known)
                throw CatalogError(CatalogError::Kind::UnknownName,
                                   "'" + name + "' is neither a model event nor a declared fluent");
        }
        values.emplace(p.name, std::move(atom));
    }
    for (const auto& [name, value] : bindings)
        if (std::none_of(t.params.begin(), t.params.end(), [&](const TemplateParam& p) { return p.name == name; }))
            throw CatalogError(CatalogError::Kind::UnknownName, "template '" + t.id + "' has no parameter " + name);
    return substitute(t.skeleton, values);
}

std::string assertion_name_for(std::string_view template_id) {
    std::string out(template_id);
    std::replace(out.begin(), out.end(), '-', '_');
    return out;
}

} // namespace flowcheck
