#pragma once

#include "cycletab/reader.hpp"
#include "cycletab/term_store.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cycletab {

// Clause term compiled for fast renaming: instantiating it allocates fresh
// cells with a fresh variable per template variable.
class TermTemplate {
public:
    static TermTemplate compile(const SourceTerm &t, CellStore &store,
                                std::map<std::string, std::uint32_t> &var_index);

    CellRef instantiate(CellStore &store, std::vector<CellRef> &vars) const;

    // Key of the first argument of a compound root; unbound key otherwise.
    struct Key {
        bool bound = false;
        CellKind kind = CellKind::Var;
        std::int64_t value = 0;
        std::uint32_t arity = 0;
    };
    Key first_arg_key() const;

private:
    struct Node {
        CellKind kind;
        std::uint32_t arity;
        std::int64_t value;  // symbol, integer, or variable index
        std::uint32_t first_child;
    };
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> children_;
    std::uint32_t root_ = 0;

    std::uint32_t add(const SourceTerm &t, CellStore &store,
                      std::map<std::string, std::uint32_t> &var_index);
    CellRef build(std::uint32_t n, CellStore &store, std::vector<CellRef> &vars) const;
};

// First-argument key used to skip clauses that cannot match.
using ArgKey = TermTemplate::Key;

struct Clause {
    TermTemplate head;
    TermTemplate body;
    std::uint32_t var_count = 0;
    ArgKey first_arg;
    int line = 0;
};

enum class TablingMode : std::uint8_t { plain, tabled_inductive, tabled_coinductive };

struct Predicate {
    std::uint32_t id = 0;
    SymbolId name = 0;
    std::uint32_t arity = 0;
    std::vector<Clause> clauses;
    TablingMode mode = TablingMode::plain;
    bool called = false;  // mode is frozen once set
};

// Thrown by consult for malformed directives and clauses (reported with
// the clause's line).
class ConsultError : public std::runtime_error {
public:
    ConsultError(const std::string &what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class Program {
public:
    explicit Program(CellStore &store) : store_(store) {}

    // Parses and adds clauses. Directives:
    //   :- table(p/n).                   inductive tabling
    //   :- tabling_mode(p/n, coinductive).
    //   :- tabling_mode(p/n, inductive).
    //   :- coinductive(p/n).             co-SLD program transformation
    void consult(std::string_view text);

    Predicate *find(SymbolId name, std::uint32_t arity);
    Predicate &ensure(SymbolId name, std::uint32_t arity);
    Predicate &predicate(std::uint32_t id) { return predicates_[id]; }
    std::size_t size() const { return predicates_.size(); }

    void set_mode(SymbolId name, std::uint32_t arity, TablingMode mode);

private:
    CellStore &store_;
    std::vector<Predicate> predicates_;
    std::map<std::pair<SymbolId, std::uint32_t>, std::uint32_t> index_;

    void add_clause(const SourceTerm &clause, int line);
};

// Coinductive hypothesis-stack transformation of predicate name/arity:
//   p(Args) :- p(Args, []).
//   p(Args, S) :- Body with each p(New) call replaced by check_p(New, S).
//   check_p(Args, S) :- ( member(p(Args), S) *-> true ; p(Args, [p(Args)|S]) ).
// Returns the entry clause, the worker clauses, the check clause and the
// two member clauses.
std::vector<SourceClause> transform_coinductive(const std::string &name, std::uint32_t arity,
                                                const std::vector<SourceClause> &clauses);

// Names of the helper predicates the transformation introduces.
std::string cosld_check_name(const std::string &name);
inline constexpr const char *cosld_member_name = "$cosld_member";

} // namespace cycletab
