#include "flowcheck/cli.hpp"

#include "flowcheck/encoder.hpp"
#include "flowcheck/fltl.hpp"
#include "flowcheck/fsp.hpp"
#include "flowcheck/service.hpp"
#include "flowcheck/templates.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace flowcheck::cli {

namespace {

using json = nlohmann::json;

/// Thrown to leave a command with a given exit code after printing `message`.
struct Exit {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Exit{kParse, "cannot open '" + path + "'"};
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Exit{kUsage, "cannot write '" + path + "'"};
    out << text;
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics, std::ostream& err) {
    for (const auto& d : diagnostics)
        err << to_string(d.severity) << '\t' << d.node << '\t' << d.message << '\n';
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

WorkflowSpec load_model(const std::string& path) {
    try {
        return normalize(parse_yawl(read_file(path)));
    } catch (const ParseError& e) {
        throw Exit{kParse, path + ": " + e.what()};
    }
}

/// A model that passed validation, or exit 1 with the diagnostics.
WorkflowSpec load_valid_model(const std::string& path, std::ostream& err) {
    WorkflowSpec spec = load_model(path);
    const auto diagnostics = validate(spec);
    if (has_errors(diagnostics)) {
        print_diagnostics(diagnostics, err);
        throw Exit{kDiagnostics, path + ": model is not well-formed"};
    }
    return spec;
}

Lts build(const WorkflowSpec& spec, int bound, std::size_t max_states) {
    if (bound < 1)
        throw Exit{kUsage, "--bound must be at least 1"};
    try {
        return build_lts_parallel(compile(spec, bound), BuildLimits{max_states});
    } catch (const BoundExceeded& e) {
        std::string message = e.what();
        message += "\nwitness:";
        for (const auto& event : e.witness())
            message += "\n  " + event;
        throw Exit{kStateLimit, message};
    } catch (const StateLimitExceeded& e) {
        throw Exit{kStateLimit, e.what()};
    }
}

std::string catalog_path(const std::string& flag) {
    if (!flag.empty())
        return flag;
    if (const char* env = std::getenv("FLOWCHECK_TEMPLATES"); env && *env)
        return env;
    if (std::filesystem::exists("templates.xml"))
        return "templates.xml";
    return {};
}

Catalog catalog_from(const std::string& flag) {
    const std::string path = catalog_path(flag);
    try {
        return path.empty() ? parse_catalog("") : parse_catalog(read_file(path), path);
    } catch (const CatalogError& e) {
        throw Exit{kParse, e.what()};
    }
}

json verdict_json(const std::string& name, const Verdict& v) {
    return json{{"name", name},
                {"result", v.holds ? "holds" : "violation"},
                {"prefix", v.prefix},
                {"cycle", v.cycle}};
}

void print_verdict_text(std::ostream& out, const std::string& name, const Verdict& v) {
    out << (v.holds ? "PASS " : "FAIL ") << name << '\n';
    if (v.holds)
        return;
    out << "prefix:\n";
    for (const auto& e : v.prefix)
        out << "  " << e << '\n';
    out << "cycle:\n";
    for (const auto& e : v.cycle)
        out << "  " << e << '\n';
}

struct Options {
    std::string model;
    std::string fsp;
    std::string dump_lts;
    std::string props;
    std::vector<std::string> prop_names;
    std::string format = "text";
    int bound = 1;
    std::size_t max_states = BuildLimits{}.max_states;
    std::size_t max_product = CheckOptions{}.max_product_states;
    bool stats = false;
    bool deadlocks = false;
    std::string templates;
    std::string template_id;
    std::vector<std::string> bindings;
    std::string assertion_name;
    std::string scope_props;
    ServiceConfig service;
};

int cmd_validate(const Options& o, std::ostream&, std::ostream& err) {
    const auto diagnostics = validate(load_model(o.model));
    print_diagnostics(diagnostics, err);
    return diagnostics.empty() ? kOk : kDiagnostics;
}

int cmd_compile(const Options& o, std::ostream& out, std::ostream& err) {
    const WorkflowSpec spec = load_valid_model(o.model, err);
    const auto started = std::chrono::steady_clock::now();
    const Lts lts = build(spec, o.bound, o.max_states);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    if (o.stats)
        out << "states=" << lts.num_states() << " transitions=" << lts.num_transitions() << " build_ms=" << ms.count()
            << '\n';
    if (!o.fsp.empty())
        write_file(o.fsp, emit_fsp_model(lts, fsp_process_name(spec.root.id)));
    if (!o.dump_lts.empty()) {
        std::ostringstream edges;
        write_edges(lts, edges);
        write_file(o.dump_lts, edges.str());
    }
    if (o.deadlocks) {
        for (const auto& d : find_deadlocks(lts)) {
            out << "deadlock S" << d.state << ':';
            for (const auto& e : d.path)
                out << ' ' << e;
            out << '\n';
        }
    }
    return kOk;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.format != "text" && o.format != "json")
        throw Exit{kUsage, "--format must be text or json"};
    const WorkflowSpec spec = load_valid_model(o.model, err);
    PropertySet props;
    try {
        props = parse_props(read_file(o.props));
    } catch (const SyntaxError& e) {
        throw Exit{kParse, o.props + ": " + e.what()};
    } catch (const DuplicateName& e) {
        throw Exit{kParse, o.props + ": " + e.what()};
    }

    const auto alphabet = event_alphabet(spec);
    std::vector<FluentDef> known = props.fluents;
    auto diagnostics = validate_fluents(props.fluents, alphabet);
    for (auto& f : executing_fluents(spec))
        known.push_back(std::move(f));

    std::vector<const Assertion*> selected;
    if (o.prop_names.empty()) {
        for (const auto& a : props.assertions)
            selected.push_back(&a);
    } else {
        for (const auto& name : o.prop_names) {
            const Assertion* a = props.find_assertion(name);
            if (!a)
                throw Exit{kUsage, "no assertion named '" + name + "' in " + o.props};
            selected.push_back(a);
        }
    }
    for (const Assertion* a : selected)
        for (auto& d : validate_formula(a->formula, known, alphabet, a->name))
            diagnostics.push_back(std::move(d));
    if (!diagnostics.empty()) {
        print_diagnostics(diagnostics, err);
        throw Exit{kParse, o.props + ": properties do not match the model"};
    }
    if (selected.empty())
        return kOk;

    const Lts lts = build(spec, o.bound, o.max_states);
    const CheckOptions options{o.max_product};
    const int n = static_cast<int>(selected.size());
    std::vector<Verdict> verdicts(selected.size());
    std::vector<std::exception_ptr> failures(selected.size());

#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
        try {
            const Assertion& a = *selected[i];
            verdicts[i] = check(lts, resolve_fluents(a.formula, props.fluents, spec), a.formula, options);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }

    bool all_hold = true;
    json report = json::array();
    for (int i = 0; i < n; ++i) {
        const std::string& name = selected[i]->name;
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const ProductLimitExceeded& e) {
                throw Exit{kProductLimit, name + ": " + e.what()};
            }
        }
        all_hold = all_hold && verdicts[i].holds;
        if (o.format == "json")
            report.push_back(verdict_json(name, verdicts[i]));
        else
            print_verdict_text(out, name, verdicts[i]);
    }
    if (o.format == "json")
        out << report.dump(2) << '\n';
    return all_hold ? kOk : kDiagnostics;
}

int cmd_templates_list(const Options& o, std::ostream& out) {
    for (const auto& t : catalog_from(o.templates).templates)
        out << t.id << '\t' << t.title << '\n';
    return kOk;
}

const Template& find_template(const Catalog& catalog, const std::string& id) {
    try {
        return catalog.at(id);
    } catch (const CatalogError& e) {
        throw Exit{kUsage, e.what()};
    }
}

int cmd_templates_show(const Options& o, std::ostream& out) {
    const Catalog catalog = catalog_from(o.templates);
    const Template& t = find_template(catalog, o.template_id);
    out << "id: " << t.id << '\n' << "title: " << t.title << '\n' << "description: " << t.description << '\n';
    out << "params:";
    for (const auto& p : t.params)
        out << ' ' << p.name;
    out << '\n' << "skeleton: " << to_string(t.skeleton) << '\n';
    return kOk;
}

int cmd_templates_instantiate(const Options& o, std::ostream& out, std::ostream& err) {
    const Catalog catalog = catalog_from(o.templates);
    const Template& t = find_template(catalog, o.template_id);
    std::map<std::string, std::string> bindings;
    for (const auto& b : o.bindings) {
        const auto eq = b.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Exit{kUsage, "--bind expects NAME=VALUE, got '" + b + "'"};
        bindings[b.substr(0, eq)] = b.substr(eq + 1);
    }
    NameScope scope;
    scope.open = true;
    if (!o.model.empty()) {
        const WorkflowSpec spec = load_valid_model(o.model, err);
        scope.open = false;
        scope.events = event_alphabet(spec);
        for (const auto& f : executing_fluents(spec))
            scope.fluents.insert(f.name);
        if (!o.scope_props.empty()) {
            try {
                for (const auto& f : parse_props(read_file(o.scope_props)).fluents)
                    scope.fluents.insert(f.name);
            } catch (const Error& e) {
                throw Exit{kParse, o.scope_props + ": " + e.what()};
            }
        }
    }
    try {
        const Formula f = instantiate(t, bindings, scope);
        const std::string name = o.assertion_name.empty() ? assertion_name_for(t.id) : o.assertion_name;
        out << "assert " << name << " = " << to_string(f) << '\n';
    } catch (const CatalogError& e) {
        throw Exit{kUsage, e.what()};
    }
    return kOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
    ServiceConfig config = o.service;
    config.templates_path = catalog_path(o.templates);
    Service service(config);
    const int port = service.bind();
    out << "listening on http://" << config.host << ':' << port << std::endl;
    service.listen();
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Workflow model checking with fluent temporal logic", "flowcheck"};
    app.require_subcommand(1);
    Options o;

    auto* validate_cmd = app.add_subcommand("validate", "Report structural problems of a YAWL model");
    validate_cmd->add_option("model", o.model, "YAWL specification")->required();

    auto* compile_cmd = app.add_subcommand("compile", "Build the labelled transition system of a model");
    compile_cmd->add_option("model", o.model, "YAWL specification")->required();
    compile_cmd->add_option("--fsp", o.fsp, "Write the LTS as an FSP process");
    compile_cmd->add_option("--dump-lts", o.dump_lts, "Write the edges as src<TAB>label<TAB>dst");
    compile_cmd->add_option("--bound,-k", o.bound, "Tokens allowed per condition");
    compile_cmd->add_option("--max-states", o.max_states, "State limit");
    compile_cmd->add_flag("--stats", o.stats, "Print state and transition counts");
    compile_cmd->add_flag("--deadlocks", o.deadlocks, "List deadlocked states with a shortest path");

    auto* check_cmd = app.add_subcommand("check", "Check assertions of a property file");
    check_cmd->add_option("model", o.model, "YAWL specification")->required();
    check_cmd->add_option("--props", o.props, ".flp property file")->required();
    check_cmd->add_option("--prop", o.prop_names, "Assertion to check (repeatable; default all)");
    check_cmd->add_option("--bound,-k", o.bound, "Tokens allowed per condition");
    check_cmd->add_option("--max-states", o.max_states, "State limit");
    check_cmd->add_option("--max-product-states", o.max_product, "Product state limit");
    check_cmd->add_option("--format", o.format, "text or json");

    auto* templates_cmd = app.add_subcommand("templates", "Property templates");
    templates_cmd->add_option("--catalog", o.templates, "Template catalog XML (default $FLOWCHECK_TEMPLATES)");
    templates_cmd->require_subcommand(1);
    auto* list_cmd = templates_cmd->add_subcommand("list", "List templates");
    auto* show_cmd = templates_cmd->add_subcommand("show", "Show one template");
    show_cmd->add_option("id", o.template_id)->required();
    auto* inst_cmd = templates_cmd->add_subcommand("instantiate", "Print an assert line for a template");
    inst_cmd->add_option("id", o.template_id)->required();
    inst_cmd->add_option("--bind", o.bindings, "PARAM=event-or-fluent (repeatable)");
    inst_cmd->add_option("--name", o.assertion_name, "Assertion name (default: template id)");
    inst_cmd->add_option("--model", o.model, "Restrict bindings to this model's events and fluents");
    inst_cmd->add_option("--props", o.scope_props, "Fluents declared for --model");

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--host", o.service.host);
    serve_cmd->add_option("--port", o.service.port);
    serve_cmd->add_option("--templates", o.templates, "Template catalog XML");
    serve_cmd->add_option("--bound,-k", o.service.default_bound);
    serve_cmd->add_option("--max-states", o.service.max_states);
    serve_cmd->add_option("--max-product-states", o.service.max_product_states);
    serve_cmd->add_option("--data-dir", o.service.data_dir, "Persist sessions here");
    serve_cmd->add_option("--static", o.service.static_dir, "Directory served at /");
    serve_cmd->add_option("--workers", o.service.workers);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }

    try {
        if (*validate_cmd)
            return cmd_validate(o, out, err);
        if (*compile_cmd)
            return cmd_compile(o, out, err);
        if (*check_cmd)
            return cmd_check(o, out, err);
        if (*list_cmd)
            return cmd_templates_list(o, out);
        if (*show_cmd)
            return cmd_templates_show(o, out);
        if (*inst_cmd)
            return cmd_templates_instantiate(o, out, err);
        if (*serve_cmd)
            return cmd_serve(o, out);
    } catch (const Exit& e) {
        err << e.message << '\n';
        return e.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

} // namespace flowcheck::cli
