#pragma once

#include "flowcheck/formula.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace flowcheck::detail {

enum class Tok {
    Name,        // identifier or dotted label
    Placeholder, // $name
    Bang,
    AndAnd,
    OrOr,
    Arrow,      // ->
    DoubleArrow, // <->
    Diamond,    // <>
    Box,        // []
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Equals,
    Less,
    Greater,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

std::vector<Token> tokenize(std::string_view text);

/// Recursive-descent formula parser over a token stream. Stops at the first
/// token that cannot continue the formula.
class FormulaParser {
public:
    FormulaParser(const std::vector<Token>& tokens, std::size_t pos) : tokens_(tokens), pos_(pos) {}

    Formula parse();
    std::size_t position() const { return pos_; }

private:
    Formula parse_iff();
    Formula parse_implies();
    Formula parse_temporal();
    Formula parse_or();
    Formula parse_and();
    Formula parse_unary();
    Formula parse_atom();

    const Token& peek() const { return tokens_[pos_]; }
    bool peek_keyword(std::string_view word) const { return peek().kind == Tok::Name && peek().text == word; }
    const Token& advance() { return tokens_[pos_++]; }
    [[noreturn]] void fail(const std::string& message) const;

    const std::vector<Token>& tokens_;
    std::size_t pos_;
};

bool is_reserved_word(std::string_view word);

} // namespace flowcheck::detail
