#pragma once

#include "cycletab/term_store.hpp"

#include <vector>

namespace cycletab {

//
// Relational primitives that terminate on rational terms. All co-traversals
// memoize the (left, right) pairs of structure cells already visited, so a
// cycle revisited in both terms is assumed equal (the coinductive reading of
// rational tree equality).
//

// Unification without occurs check. On failure every binding made by the
// call is undone.
bool unify(CellStore &store, Trail &trail, CellRef a, CellRef b);

// The == relation: bisimilar, with unbound variables equal only to
// themselves. Creates no bindings.
bool struct_equal(const CellStore &store, CellRef a, CellRef b);

// Equal up to a bijective renaming of unbound variables.
bool variant(const CellStore &store, CellRef a, CellRef b);

bool is_acyclic(const CellStore &store, CellRef a);

// Number of distinct cells reachable from a (after dereferencing).
std::size_t reachable_cells(const CellStore &store, CellRef a);

// Top-level =.. decomposition. Pairs decompose as ['.', Head, Tail];
// atomic terms as [Term]. Cyclic terms are decomposed one level only.
// Throws PrologError(instantiation) on an unbound variable.
std::vector<CellRef> univ(CellStore &store, CellRef a);

// Inverse of univ. ['.', H, T] rebuilds a pair.
CellRef univ_inverse(CellStore &store, std::span<const CellRef> parts);

// Test oracle: compares the finite unfoldings of both terms to depth
// |cells(a)| * |cells(b)| + 1. Independent of the visited-pairs technique.
bool bisimilar(const CellStore &store, CellRef a, CellRef b);

// Unfolding comparison to an explicit depth.
bool equal_to_depth(const CellStore &store, CellRef a, CellRef b, std::size_t depth);

} // namespace cycletab
