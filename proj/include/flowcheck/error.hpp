#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowcheck {

using EventLabel = std::string;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
    MalformedXml,
    MissingInputCondition,
    MissingOutputCondition,
    DanglingReference,
    UnsupportedFeature,
    InvalidId,
    DuplicateId,
};

const char* to_string(ParseErrorKind kind);

class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, const std::string& message)
        : Error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ParseErrorKind kind() const { return kind_; }

private:
    ParseErrorKind kind_;
};

/// A firing would push a place past its capacity. `witness` is the firing
/// sequence from the initial marking whose last event overflows `place`.
class BoundExceeded : public Error {
public:
    BoundExceeded(std::string place, int bound, std::vector<EventLabel> witness);

    const std::string& place() const { return place_; }
    int bound() const { return bound_; }
    const std::vector<EventLabel>& witness() const { return witness_; }

private:
    std::string place_;
    int bound_;
    std::vector<EventLabel> witness_;
};

class StateLimitExceeded : public Error {
public:
    explicit StateLimitExceeded(std::size_t limit)
        : Error("StateLimitExceeded: more than " + std::to_string(limit) + " states"), limit_(limit) {}
    std::size_t limit() const { return limit_; }

private:
    std::size_t limit_;
};

class ProductLimitExceeded : public Error {
public:
    explicit ProductLimitExceeded(std::size_t limit)
        : Error("ProductLimitExceeded: more than " + std::to_string(limit) + " product states"),
          limit_(limit) {}
    std::size_t limit() const { return limit_; }

private:
    std::size_t limit_;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, const std::string& message)
        : Error("SyntaxError at " + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

class DuplicateName : public Error {
public:
    explicit DuplicateName(const std::string& name) : Error("DuplicateName: " + name), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

} // namespace flowcheck
