#pragma once

#include <stdexcept>
#include <string>

namespace veil {

/// Input text could not be parsed (DOT, JSON, Layout JSON, Graphviz plain).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : std::runtime_error(what + " at line " + std::to_string(line) + ", column " +
                             std::to_string(column)),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_ = 0;
    std::size_t column_ = 0;
};

/// Input is well-formed but violates an operation's precondition.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace veil
