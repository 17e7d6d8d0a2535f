#include "cycletab/canonical.hpp"

#include "cycletab/rational_ops.hpp"

#include <algorithm>

namespace cycletab {

namespace {

bool in_stack(const CellStore &store, CellRef t, const AncestorStack &stack)
{
    return std::any_of(stack.begin(), stack.end(),
                       [&](CellRef s) { return struct_equal(store, t, s); });
}

} // namespace

std::vector<CellRef> decompose_cyclic_term(CellStore &store, Trail &trail, CellRef cyclic,
                                           const std::vector<CellRef> &in, CellRef open_end,
                                           AncestorStack &stack)
{
    std::vector<CellRef> out;
    out.reserve(in.size());
    for (auto term : in) {
        // Clauses are tried in order and committed, as with the cuts of the
        // logic-program formulation.
        if (is_acyclic(store, term)) {
            out.push_back(term);
            continue;
        }
        if (struct_equal(store, cyclic, term)) {
            out.push_back(open_end);
            continue;
        }
        if (!in_stack(store, term, stack)) {
            auto parts = univ(store, term);
            auto inner_end = store.new_var();
            stack.push_back(store.deref(term));
            auto rebuilt = decompose_cyclic_term(store, trail, term, parts, inner_end, stack);
            stack.pop_back();
            auto candidate = univ_inverse(store, rebuilt);
            // Trial closure: keep the cycle here only if it reproduces the
            // original subterm, otherwise hand the open end to the parent.
            auto trial = store.mark(trail);
            bool closed = unify(store, trail, candidate, inner_end) &&
                          struct_equal(store, candidate, term);
            if (!closed) {
                // the trial allocates no cells, so this only drops its bindings
                store.undo_to(trail, trial);
                unify(store, trail, inner_end, open_end);
            }
            out.push_back(candidate);
            continue;
        }
        out.push_back(open_end);
    }
    return out;
}

CellRef canonical_term(CellStore &store, Trail &trail, CellRef t)
{
    auto root = store.deref(t);
    if (!store.is_structure(root))
        return root;
    auto parts = univ(store, root);
    auto open_end = store.new_var();
    AncestorStack stack{root};
    auto rebuilt = decompose_cyclic_term(store, trail, root, parts, open_end, stack);
    auto canonical = univ_inverse(store, rebuilt);
    unify(store, trail, canonical, open_end);
    return store.deref(canonical);
}

} // namespace cycletab
