#pragma once

#include <stdexcept>
#include <string>

namespace cycletab {

// Runtime errors raised while solving (ISO-style error classes).
class PrologError : public std::runtime_error {
public:
    enum class Kind { instantiation, type, existence, evaluation, permission, construction, resource };

    PrologError(Kind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string &what, int line, int column)
        : std::runtime_error("syntax error at " + std::to_string(line) + ":" +
                             std::to_string(column) + ": " + what),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Trie contents that violate the rational-reference invariants.
class TableCorruption : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace cycletab
