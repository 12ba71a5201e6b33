#include "flowcheck/fsp.hpp"

#include <cctype>
#include <sstream>

namespace flowcheck {

std::string emit_fsp_model(const Lts& lts, const std::string& name) {
    std::ostringstream out;
    out << name << " = S0";
    for (StateId s = 0; s < lts.num_states(); ++s) {
        out << ",\nS" << s << " = (";
        const auto& edges = lts.edges[s];
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (i)
                out << " | ";
            out << lts.label(edges[i].label) << " -> S" << edges[i].target;
        }
        out << ")";
    }
    out << ".\n";
    return out.str();
}

namespace {

void write_set(std::ostringstream& out, const std::vector<EventLabel>& events) {
    out << '{';
    for (std::size_t i = 0; i < events.size(); ++i)
        out << (i ? ", " : "") << events[i];
    out << '}';
}

} // namespace

std::string emit_fsp_fluents(std::span<const FluentDef> fluents, std::span<const Assertion> assertions) {
    std::ostringstream out;
    for (const auto& f : fluents) {
        out << "fluent " << f.name << " = <";
        write_set(out, f.initiating);
        out << ", ";
        write_set(out, f.terminating);
        out << '>';
        if (f.initially)
            out << " initially true";
        out << '\n';
    }
    for (const auto& a : assertions)
        out << "assert " << a.name << " = " << to_string(a.formula) << '\n';
    return out.str();
}

std::string emit_fsp_fluents(const PropertySet& props) { return emit_fsp_fluents(props.fluents, props.assertions); }

std::string fsp_process_name(std::string_view hint) {
    std::string out;
    for (char c : hint)
        out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : '_';
    if (out.empty() || !std::isupper(static_cast<unsigned char>(out.front())))
        out.insert(0, "P");
    return out;
}

} // namespace flowcheck
