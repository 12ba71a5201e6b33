#pragma once

#include "flowcheck/error.hpp"

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace flowcheck {

enum class Op {
    True,
    False,
    Event,       // name = event label
    Fluent,      // name = fluent name
    Placeholder, // name = template parameter (without '$')
    Not,
    Next,
    Eventually,
    Always,
    And,
    Or,
    Implies,
    Iff,
    Until,
    WeakUntil,
    Release,
};

/// FLTL formula tree. Value type; children are held by value.
struct Formula {
    Op op = Op::True;
    std::string name;
    std::vector<Formula> args;

    bool operator==(const Formula&) const = default;

    bool is_atom() const { return args.empty(); }
};

namespace fml {
Formula truth();
Formula falsity();
Formula event(std::string label);
Formula fluent(std::string name);
Formula placeholder(std::string name);
Formula unary(Op op, Formula arg);
Formula binary(Op op, Formula lhs, Formula rhs);
Formula not_(Formula f);
Formula next(Formula f);
Formula eventually(Formula f);
Formula always(Formula f);
Formula and_(Formula a, Formula b);
Formula or_(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula until(Formula a, Formula b);
Formula weak_until(Formula a, Formula b);
Formula release(Formula a, Formula b);
} // namespace fml

/// Names containing '.', the reserved `_terminate`/`_deadlock` labels, and
/// builtin `Executing(path)` references are not plain fluent identifiers.
bool is_event_name(std::string_view name);
bool is_identifier(std::string_view name);

/// Parses a single formula. Precedence, loosest first:
///   <->  ->(right)  U W R(right)  ||  &&  unary(! X <> [])
/// Event labels are dotted names or reserved labels; other identifiers are
/// fluent references; `$name` is a template placeholder.
Formula parse_formula(std::string_view text);

/// Minimal-parenthesis rendering that parse_formula maps back to an equal tree.
std::string to_string(const Formula& f);

std::set<std::string> fluent_refs(const Formula& f);
std::set<std::string> event_refs(const Formula& f);
std::set<std::string> placeholders(const Formula& f);

std::size_t depth(const Formula& f);

} // namespace flowcheck
