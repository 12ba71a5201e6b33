#include "flowcheck/fltl.hpp"

#include "lexer.hpp"

#include <algorithm>

namespace flowcheck {

const FluentDef* PropertySet::find_fluent(std::string_view name) const {
    auto it = std::find_if(fluents.begin(), fluents.end(), [&](const FluentDef& f) { return f.name == name; });
    return it == fluents.end() ? nullptr : &*it;
}

const Assertion* PropertySet::find_assertion(std::string_view name) const {
    auto it = std::find_if(assertions.begin(), assertions.end(), [&](const Assertion& a) { return a.name == name; });
    return it == assertions.end() ? nullptr : &*it;
}

namespace {

using detail::Tok;
using detail::Token;

class PropsParser {
public:
    explicit PropsParser(std::string_view text) : tokens_(detail::tokenize(text)) {}

    PropertySet run() {
        PropertySet out;
        while (peek().kind != Tok::End) {
            if (is_keyword("fluent")) {
                advance();
                FluentDef def = parse_fluent();
                declare(def.name);
                out.fluents.push_back(std::move(def));
            } else if (is_keyword("assert")) {
                advance();
                const std::string name = expect_name("assertion name");
                expect(Tok::Equals, "'='");
                detail::FormulaParser formula(tokens_, pos_);
                Assertion assertion{name, formula.parse()};
                pos_ = formula.position();
                declare(name);
                out.assertions.push_back(std::move(assertion));
            } else {
                fail("expected 'fluent' or 'assert'");
            }
        }
        return out;
    }

private:
    FluentDef parse_fluent() {
        FluentDef def;
        def.name = expect_name("fluent name");
        expect(Tok::Equals, "'='");
        expect(Tok::Less, "'<'");
        def.initiating = parse_event_set();
        expect(Tok::Comma, "','");
        def.terminating = parse_event_set();
        expect(Tok::Greater, "'>'");
        if (is_keyword("initially")) {
            advance();
            if (is_keyword("true"))
                def.initially = true;
            else if (!is_keyword("false"))
                fail("expected 'true' or 'false'");
            advance();
        }
        return def;
    }

    // An empty set `{}` is accepted so that fluents without terminating
    // events can be written down.
    std::vector<EventLabel> parse_event_set() {
        expect(Tok::LBrace, "'{'");
        std::vector<EventLabel> out;
        if (peek().kind == Tok::RBrace) {
            advance();
            return out;
        }
        for (;;) {
            if (peek().kind != Tok::Name || detail::is_reserved_word(peek().text))
                fail("expected an event label");
            std::string label = advance().text;
            if (std::find(out.begin(), out.end(), label) == out.end())
                out.push_back(std::move(label));
            if (peek().kind == Tok::Comma) {
                advance();
                continue;
            }
            expect(Tok::RBrace, "'}' or ','");
            return out;
        }
    }

    std::string expect_name(const char* what) {
        if (peek().kind != Tok::Name || detail::is_reserved_word(peek().text) || !is_identifier(peek().text) ||
            is_event_name(peek().text))
            fail(std::string("expected ") + what);
        return advance().text;
    }

    void expect(Tok kind, const char* what) {
        if (peek().kind != kind)
            fail(std::string("expected ") + what);
        advance();
    }

    void declare(const std::string& name) {
        if (std::find(names_.begin(), names_.end(), name) != names_.end())
            throw DuplicateName(name);
        names_.push_back(name);
    }

    bool is_keyword(std::string_view word) const { return peek().kind == Tok::Name && peek().text == word; }
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const std::string& message) const {
        const Token& t = peek();
        throw SyntaxError(t.line, t.column,
                          message + (t.kind == Tok::End ? " at end of input" : ", found '" + t.text + "'"));
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> names_;
};

} // namespace

PropertySet parse_props(std::string_view text) { return PropsParser(text).run(); }

std::vector<Diagnostic> validate_fluents(std::span<const FluentDef> fluents, const std::set<EventLabel>& alphabet) {
    std::vector<Diagnostic> out;
    std::set<std::string> names;
    for (const auto& f : fluents) {
        auto report = [&](const char* kind, const std::string& message) {
            out.push_back(Diagnostic{Severity::Error, kind, f.name, message});
        };
        if (!is_identifier(f.name) || detail::is_reserved_word(f.name))
            report("InvalidName", "'" + f.name + "' is not a valid fluent name");
        if (!names.insert(f.name).second)
            report("DuplicateName", "fluent declared more than once");
        if (f.initiating.empty())
            report("EmptyInitiating", "fluent has no initiating events");
        for (const auto& e : f.initiating)
            if (!alphabet.contains(e))
                report("UnknownEvent", "initiating event '" + e + "' is not in the model alphabet");
        for (const auto& e : f.terminating)
            if (!alphabet.contains(e))
                report("UnknownEvent", "terminating event '" + e + "' is not in the model alphabet");
        for (const auto& e : f.initiating)
            if (std::find(f.terminating.begin(), f.terminating.end(), e) != f.terminating.end())
                report("OverlappingSets", "event '" + e + "' both initiates and terminates the fluent");
    }
    return out;
}

std::vector<Diagnostic> validate_formula(const Formula& formula, std::span<const FluentDef> fluents,
                                         const std::set<EventLabel>& alphabet, const std::string& where) {
    std::vector<Diagnostic> out;
    for (const auto& name : fluent_refs(formula)) {
        const bool declared =
            std::any_of(fluents.begin(), fluents.end(), [&](const FluentDef& f) { return f.name == name; });
        if (!declared)
            out.push_back(Diagnostic{Severity::Error, "UnknownFluent", where.empty() ? name : where,
                                     "fluent '" + name + "' is not declared"});
    }
    for (const auto& label : event_refs(formula))
        if (!alphabet.contains(label))
            out.push_back(Diagnostic{Severity::Error, "UnknownEvent", where.empty() ? label : where,
                                     "event '" + label + "' is not in the model alphabet"});
    for (const auto& p : placeholders(formula))
        out.push_back(Diagnostic{Severity::Error, "UnboundPlaceholder", where.empty() ? "$" + p : where,
                                 "placeholder $" + p + " is not bound"});
    return out;
}

std::vector<FluentDef> executing_fluents(const WorkflowSpec& spec) {
    std::vector<FluentDef> out;
    std::map<std::string, std::size_t> by_path;
    for_each_net_instance(spec, [&](const NetInstance& inst) {
        for (const auto& task : inst.net.tasks) {
            const std::string path = inst.prefix + task.id;
            by_path[path] = out.size();
            out.push_back(FluentDef{"Executing(" + path + ")", {path + ".start"}, {path + ".end"}, false});
        }
    });
    for_each_net_instance(spec, [&](const NetInstance& inst) {
        for (const auto& task : inst.net.tasks) {
            const std::string canceller = inst.prefix + task.id + ".end";
            for (const auto& target : task.cancel_set) {
                if (!inst.net.find_task(target))
                    continue;
                const std::string cancelled = inst.prefix + target;
                for (auto& [path, index] : by_path) {
                    if (path != cancelled && !path.starts_with(cancelled + "."))
                        continue;
                    auto& term = out[index].terminating;
                    if (std::find(term.begin(), term.end(), canceller) == term.end())
                        term.push_back(canceller);
                }
            }
        }
    });
    return out;
}

std::vector<FluentDef> resolve_fluents(const Formula& formula, std::span<const FluentDef> declared,
                                       const WorkflowSpec& spec) {
    const auto refs = fluent_refs(formula);
    std::vector<FluentDef> out;
    for (const auto& f : declared)
        if (refs.contains(f.name))
            out.push_back(f);
    std::vector<FluentDef> builtins;
    for (const auto& name : refs) {
        if (!name.starts_with("Executing(") ||
            std::any_of(out.begin(), out.end(), [&](const FluentDef& f) { return f.name == name; }))
            continue;
        if (builtins.empty())
            builtins = executing_fluents(spec);
        for (const auto& b : builtins)
            if (b.name == name)
                out.push_back(b);
    }
    return out;
}

} // namespace flowcheck
