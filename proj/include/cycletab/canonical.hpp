#pragma once

#include "cycletab/term_store.hpp"

#include <vector>

namespace cycletab {

//
// Canonical representation of rational terms. The term is fragmented into
// its cyclic subterms, each fragment is rebuilt acyclically with an open
// end in place of the cyclic reference, and the open end is then bound to
// the innermost rebuilt fragment that reproduces the original term. Acyclic
// components are shared with the input, not copied.
//

// Ancestor structure cells on the current decomposition path, innermost
// last. Membership is tested with struct_equal.
using AncestorStack = std::vector<CellRef>;

CellRef canonical_term(CellStore &store, Trail &trail, CellRef t);

// One level of the decomposition: rewrites the =.. components `in` of
// `cyclic`, threading `open_end` through. Exposed for tests.
std::vector<CellRef> decompose_cyclic_term(CellStore &store, Trail &trail, CellRef cyclic,
                                           const std::vector<CellRef> &in, CellRef open_end,
                                           AncestorStack &stack);

} // namespace cycletab
