#pragma once

#include "cycletab/term_store.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cycletab {

// Parsed, store-independent term. Lists are '.'/2 compounds ending in '[]'.
struct SourceTerm {
    enum class Kind { Var, Atom, Int, Compound };

    Kind kind = Kind::Atom;
    std::string name;  // variable name, atom or functor
    std::int64_t value = 0;
    std::vector<SourceTerm> args;
    int line = 0;
    int column = 0;

    static SourceTerm var(std::string n) { return {Kind::Var, std::move(n), 0, {}, 0, 0}; }
    static SourceTerm atom(std::string n) { return {Kind::Atom, std::move(n), 0, {}, 0, 0}; }
    static SourceTerm integer(std::int64_t v) { return {Kind::Int, {}, v, {}, 0, 0}; }
    static SourceTerm compound(std::string f, std::vector<SourceTerm> a)
    {
        return {Kind::Compound, std::move(f), 0, std::move(a), 0, 0};
    }

    bool is_compound(std::string_view f, std::size_t arity) const
    {
        return kind == Kind::Compound && name == f && args.size() == arity;
    }
    bool is_atom(std::string_view a) const { return kind == Kind::Atom && name == a; }
};

struct SourceClause {
    SourceTerm term;
    int line = 0;
};

struct SourceProgram {
    std::vector<SourceClause> clauses;  // directives are ':-'/1 terms
};

struct SourceQuery {
    std::vector<SourceTerm> goals;
    // Named (non-anonymous) variables in first-occurrence order.
    std::vector<std::string> variables;
};

// Throws SyntaxError with line/column.
SourceProgram parse_program(std::string_view text);
SourceQuery parse_query(std::string_view text);
// A single term; a trailing '.' is optional.
SourceTerm parse_term(std::string_view text);

// Splits a ','/2 chain into its conjuncts.
std::vector<SourceTerm> flatten_conjunction(const SourceTerm &t);

// Named variables of t in first-occurrence order ('_' excluded).
void collect_variables(const SourceTerm &t, std::vector<std::string> &out);

using VarBindings = std::map<std::string, CellRef>;

// Builds cells for t. Variables are looked up in (and added to) vars; the
// anonymous variable '_' is always fresh.
CellRef build_term(CellStore &store, const SourceTerm &t, VarBindings &vars);

// A term literal optionally written as cycle-label equations, such as
// "L=[1,2,3|L]" or "A=[2,3|A], B=[1|A]". Each label becomes a variable cell
// bound to the labelled term; root is the first label's term.
struct BuiltLiteral {
    CellRef root;
    std::vector<std::pair<std::string, CellRef>> labels;
    VarBindings variables;
};

// Throws PrologError(construction) for duplicate or undefined labels.
BuiltLiteral build_literal(CellStore &store, std::string_view text);

} // namespace cycletab
