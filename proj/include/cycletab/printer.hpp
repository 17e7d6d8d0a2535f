#pragma once

#include "cycletab/term_store.hpp"

#include "json.hpp"
#include <string>
#include <utility>
#include <vector>

namespace cycletab {

using NamedBinding = std::pair<std::string, CellRef>;

// Rendered answer: one equation per visible query variable, followed by the
// auxiliary _S<k> equations that close unnamed interior cycles.
struct AnswerText {
    std::vector<std::string> equations;

    std::string text() const;
};

// Variables whose name starts with '_' are not printed. A revisited
// pair/compound prints as the name of the variable bound to it, or as a
// fresh _S<k> with its own equation. Unbound variables print as _<k>.
AnswerText print_answer(const CellStore &store, const std::vector<NamedBinding> &bindings);

// One term on its own. Interior cycles are closed with _S<k> equations
// appended after the term, separated by ", ".
std::string format_term(const CellStore &store, CellRef t);

// {"bindings":[{"var":..., "term":..., "cycles":[{"at":[...], "target":[...]}]}]}
// Terms are trees of {"atom"}, {"int"}, {"var"}, {"functor","args"} and
// {"ref": path}; a path lists argument indices from the binding's root
// (pairs use 0 for head, 1 for tail).
nlohmann::json answer_json(const CellStore &store, const std::vector<NamedBinding> &bindings);

std::string quote_atom_if_needed(const std::string &name);

} // namespace cycletab
