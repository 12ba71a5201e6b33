#include "lexer.hpp"

#include <algorithm>
#include <cctype>

namespace flowcheck {

namespace fml {
Formula truth() { return Formula{Op::True, {}, {}}; }
Formula falsity() { return Formula{Op::False, {}, {}}; }
Formula event(std::string label) { return Formula{Op::Event, std::move(label), {}}; }
Formula fluent(std::string name) { return Formula{Op::Fluent, std::move(name), {}}; }
Formula placeholder(std::string name) { return Formula{Op::Placeholder, std::move(name), {}}; }
Formula unary(Op op, Formula arg) { return Formula{op, {}, {std::move(arg)}}; }
Formula binary(Op op, Formula lhs, Formula rhs) { return Formula{op, {}, {std::move(lhs), std::move(rhs)}}; }
Formula not_(Formula f) { return unary(Op::Not, std::move(f)); }
Formula next(Formula f) { return unary(Op::Next, std::move(f)); }
Formula eventually(Formula f) { return unary(Op::Eventually, std::move(f)); }
Formula always(Formula f) { return unary(Op::Always, std::move(f)); }
Formula and_(Formula a, Formula b) { return binary(Op::And, std::move(a), std::move(b)); }
Formula or_(Formula a, Formula b) { return binary(Op::Or, std::move(a), std::move(b)); }
Formula implies(Formula a, Formula b) { return binary(Op::Implies, std::move(a), std::move(b)); }
Formula iff(Formula a, Formula b) { return binary(Op::Iff, std::move(a), std::move(b)); }
Formula until(Formula a, Formula b) { return binary(Op::Until, std::move(a), std::move(b)); }
Formula weak_until(Formula a, Formula b) { return binary(Op::WeakUntil, std::move(a), std::move(b)); }
Formula release(Formula a, Formula b) { return binary(Op::Release, std::move(a), std::move(b)); }
} // namespace fml

bool is_identifier(std::string_view name) {
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
        return false;
    return std::all_of(name.begin(), name.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_event_name(std::string_view name) {
    return name.find('.') != std::string_view::npos || name == "_terminate" || name == "_deadlock";
}

namespace detail {

bool is_reserved_word(std::string_view word) {
    static constexpr std::string_view words[] = {"X", "U", "W", "R", "true", "false", "fluent", "assert", "initially"};
    return std::find(std::begin(words), std::end(words), word) != std::end(words);
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1, column = 1;
    std::size_t i = 0;
    auto bump = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };
    auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    auto ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };

    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n')
                bump(1);
            continue;
        }
        const int l = line, col = column;
        auto emit = [&](Tok kind, std::size_t len) {
            out.push_back(Token{kind, std::string(text.substr(i, len)), l, col});
            bump(len);
        };
        auto starts = [&](std::string_view s) { return text.substr(i, s.size()) == s; };

        if (ident_start(c) || c == '$') {
            std::size_t j = i + (c == '$' ? 1 : 0);
            if (c == '$' && (j >= text.size() || !ident_start(text[j])))
                throw SyntaxError(l, col, "'$' must be followed by a parameter name");
            while (j < text.size() && ident_char(text[j]))
                ++j;
            // Dotted continuation for event labels such as booking.flight.start.
            while (c != '$' && j + 1 < text.size() && text[j] == '.' && ident_char(text[j + 1])) {
                ++j;
                while (j < text.size() && ident_char(text[j]))
                    ++j;
            }
            if (c == '$') {
                out.push_back(Token{Tok::Placeholder, std::string(text.substr(i + 1, j - i - 1)), l, col});
                bump(j - i);
            } else {
                emit(Tok::Name, j - i);
            }
        } else if (starts("<->")) {
            emit(Tok::DoubleArrow, 3);
        } else if (starts("<>")) {
            emit(Tok::Diamond, 2);
        } else if (starts("[]")) {
            emit(Tok::Box, 2);
        } else if (starts("->")) {
            emit(Tok::Arrow, 2);
        } else if (starts("&&")) {
            emit(Tok::AndAnd, 2);
        } else if (starts("||")) {
            emit(Tok::OrOr, 2);
        } else {
            switch (c) {
            case '!': emit(Tok::Bang, 1); break;
            case '(': emit(Tok::LParen, 1); break;
            case ')': emit(Tok::RParen, 1); break;
            case '{': emit(Tok::LBrace, 1); break;
            case '}': emit(Tok::RBrace, 1); break;
            case ',': emit(Tok::Comma, 1); break;
            case '=': emit(Tok::Equals, 1); break;
            case '<': emit(Tok::Less, 1); break;
            case '>': emit(Tok::Greater, 1); break;
            default:
                throw SyntaxError(l, col, std::string("unexpected character '") + c + "'");
            }
        }
    }
    out.push_back(Token{Tok::End, "", line, column});
    return out;
}

void FormulaParser::fail(const std::string& message) const {
    const Token& t = peek();
    throw SyntaxError(t.line, t.column, message + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"));
}

Formula FormulaParser::parse() { return parse_iff(); }

Formula FormulaParser::parse_iff() {
    Formula lhs = parse_implies();
    while (peek().kind == Tok::DoubleArrow) {
        advance();
        lhs = fml::iff(std::move(lhs), parse_implies());
    }
    return lhs;
}

Formula FormulaParser::parse_implies() {
    Formula lhs = parse_temporal();
    if (peek().kind == Tok::Arrow) {
        advance();
        return fml::implies(std::move(lhs), parse_implies());
    }
    return lhs;
}

Formula FormulaParser::parse_temporal() {
    Formula lhs = parse_or();
    Op op;
    if (peek_keyword("U"))
        op = Op::Until;
    else if (peek_keyword("W"))
        op = Op::WeakUntil;
    else if (peek_keyword("R"))
        op = Op::Release;
    else
        return lhs;
    advance();
    return fml::binary(op, std::move(lhs), parse_temporal());
}

Formula FormulaParser::parse_or() {
    Formula lhs = parse_and();
    while (peek().kind == Tok::OrOr) {
        advance();
        lhs = fml::or_(std::move(lhs), parse_and());
    }
    return lhs;
}

Formula FormulaParser::parse_and() {
    Formula lhs = parse_unary();
    while (peek().kind == Tok::AndAnd) {
        advance();
        lhs = fml::and_(std::move(lhs), parse_unary());
    }
    return lhs;
}

Formula FormulaParser::parse_unary() {
    switch (peek().kind) {
    case Tok::Bang:
        advance();
        return fml::not_(parse_unary());
    case Tok::Diamond:
        advance();
        return fml::eventually(parse_unary());
    case Tok::Box:
        advance();
        return fml::always(parse_unary());
    default:
        break;
    }
    if (peek_keyword("X")) {
        advance();
        return fml::next(parse_unary());
    }
    return parse_atom();
}

Formula FormulaParser::parse_atom() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
        advance();
        Formula inner = parse_iff();
        if (peek().kind != Tok::RParen)
            fail("expected ')'");
        advance();
        return inner;
    }
    if (t.kind == Tok::Placeholder) {
        advance();
        return fml::placeholder(t.text);
    }
    if (t.kind != Tok::Name)
        fail("expected a formula");
    if (t.text == "true" || t.text == "false") {
        advance();
        return t.text == "true" ? fml::truth() : fml::falsity();
    }
    if (is_reserved_word(t.text))
        fail("expected a formula");
    advance();
    if (t.text == "Executing" && peek().kind == Tok::LParen) {
        advance();
        if (peek().kind != Tok::Name)
            fail("expected a task path");
        std::string path = advance().text;
        if (peek().kind != Tok::RParen)
            fail("expected ')'");
        advance();
        return fml::fluent("Executing(" + path + ")");
    }
    if (is_event_name(t.text))
        return fml::event(t.text);
    return fml::fluent(t.text);
}

} // namespace detail

Formula parse_formula(std::string_view text) {
    const auto tokens = detail::tokenize(text);
    detail::FormulaParser parser(tokens, 0);
    Formula f = parser.parse();
    const auto& rest = tokens[parser.position()];
    if (rest.kind != detail::Tok::End)
        throw SyntaxError(rest.line, rest.column, "unexpected '" + rest.text + "' after formula");
    return f;
}

namespace {

// Binding strength used by the printer; higher binds tighter.
int level(Op op) {
    switch (op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Until:
    case Op::WeakUntil:
    case Op::Release: return 3;
    case Op::Or: return 4;
    case Op::And: return 5;
    case Op::Not:
    case Op::Next:
    case Op::Eventually:
    case Op::Always: return 6;
    default: return 7;
    }
}

bool right_assoc(Op op) { return op == Op::Implies || op == Op::Until || op == Op::WeakUntil || op == Op::Release; }

const char* symbol(Op op) {
    switch (op) {
    case Op::Not: return "!";
    case Op::Next: return "X ";
    case Op::Eventually: return "<>";
    case Op::Always: return "[]";
    case Op::And: return " && ";
    case Op::Or: return " || ";
    case Op::Implies: return " -> ";
    case Op::Iff: return " <-> ";
    case Op::Until: return " U ";
    case Op::WeakUntil: return " W ";
    case Op::Release: return " R ";
    default: return "";
    }
}

void print(const Formula& f, std::string& out) {
    switch (f.op) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Event:
    case Op::Fluent: out += f.name; return;
    case Op::Placeholder: out += "$" + f.name; return;
    default: break;
    }
    auto child = [&](const Formula& c, bool parens) {
        if (parens)
            out += '(';
        print(c, out);
        if (parens)
            out += ')';
    };
    const int mine = level(f.op);
    if (f.args.size() == 1) {
        out += symbol(f.op);
        child(f.args[0], level(f.args[0].op) < mine);
        return;
    }
    const int lhs = level(f.args[0].op), rhs = level(f.args[1].op);
    // Operators sharing a level (U, W, R) do not associate with each other.
    const bool same_group_lhs = lhs == mine && f.args[0].op != f.op;
    const bool same_group_rhs = rhs == mine && f.args[1].op != f.op;
    if (right_assoc(f.op)) {
        child(f.args[0], lhs <= mine);
        out += symbol(f.op);
        child(f.args[1], rhs < mine || same_group_rhs);
    } else {
        child(f.args[0], lhs < mine || same_group_lhs);
        out += symbol(f.op);
        child(f.args[1], rhs <= mine);
    }
}

void collect(const Formula& f, Op op, std::set<std::string>& out) {
    if (f.op == op)
        out.insert(f.name);
    for (const auto& a : f.args)
        collect(a, op, out);
}

} // namespace

std::string to_string(const Formula& f) {
    std::string out;
    print(f, out);
    return out;
}

std::set<std::string> fluent_refs(const Formula& f) {
    std::set<std::string> out;
    collect(f, Op::Fluent, out);
    return out;
}

std::set<std::string> event_refs(const Formula& f) {
    std::set<std::string> out;
    collect(f, Op::Event, out);
    return out;
}

std::set<std::string> placeholders(const Formula& f) {
    std::set<std::string> out;
    collect(f, Op::Placeholder, out);
    return out;
}

std::size_t depth(const Formula& f) {
    std::size_t d = 0;
    for (const auto& a : f.args)
        d = std::max(d, depth(a));
    return f.args.empty() ? 0 : d + 1;
}

} // namespace flowcheck
