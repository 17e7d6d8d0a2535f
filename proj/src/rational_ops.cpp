#include "cycletab/rational_ops.hpp"

#include "cycletab/errors.hpp"

#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace cycletab {

namespace {

using CellPair = std::pair<CellRef, CellRef>;
using VisitedPairs = std::unordered_set<CellPair, CellPairHash>;

// Same constructor: kind, functor and arity agree. Atomic values compared too.
bool same_shape(const CellStore &store, CellRef a, CellRef b)
{
    const auto &ca = store.cell(a);
    const auto &cb = store.cell(b);
    if (ca.kind != cb.kind)
        return false;
    switch (ca.kind) {
    case CellKind::Atom:
    case CellKind::Int:
        return ca.value == cb.value;
    case CellKind::Pair:
        return true;
    case CellKind::Compound:
        return ca.value == cb.value && ca.arity == cb.arity;
    case CellKind::Var:
        return false;
    }
    return false;
}

} // namespace

bool unify(CellStore &store, Trail &trail, CellRef a, CellRef b)
{
    auto start = store.mark(trail);
    VisitedPairs visited;
    std::vector<CellPair> work{{a, b}};
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        x = store.deref(x);
        y = store.deref(y);
        if (x == y)
            continue;
        if (store.is_var(x)) {
            store.bind(trail, x, y);
            continue;
        }
        if (store.is_var(y)) {
            store.bind(trail, y, x);
            continue;
        }
        if (!same_shape(store, x, y)) {
            // unify allocates no cells, so this only drops bindings
            store.undo_to(trail, start);
            return false;
        }
        if (!store.is_structure(x))
            continue;
        if (!visited.insert({x, y}).second)
            continue;
        for (auto i = store.child_count(x); i > 0; --i)
            work.emplace_back(store.child(x, i - 1), store.child(y, i - 1));
    }
    return true;
}

bool struct_equal(const CellStore &store, CellRef a, CellRef b)
{
    VisitedPairs visited;
    std::vector<CellPair> work{{a, b}};
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        x = store.deref(x);
        y = store.deref(y);
        if (x == y)
            continue;
        if (!same_shape(store, x, y))
            return false;
        if (!store.is_structure(x))
            continue;
        if (!visited.insert({x, y}).second)
            continue;
        for (auto i = store.child_count(x); i > 0; --i)
            work.emplace_back(store.child(x, i - 1), store.child(y, i - 1));
    }
    return true;
}

bool variant(const CellStore &store, CellRef a, CellRef b)
{
    VisitedPairs visited;
    std::unordered_map<CellRef, CellRef, CellRefHash> forward;
    std::unordered_map<CellRef, CellRef, CellRefHash> backward;
    std::vector<CellPair> work{{a, b}};
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        x = store.deref(x);
        y = store.deref(y);
        bool xv = store.is_var(x);
        bool yv = store.is_var(y);
        if (xv || yv) {
            if (!(xv && yv))
                return false;
            auto f = forward.find(x);
            auto g = backward.find(y);
            if (f == forward.end() && g == backward.end()) {
                forward.emplace(x, y);
                backward.emplace(y, x);
                continue;
            }
            if (f == forward.end() || g == backward.end() || f->second != y || g->second != x)
                return false;
            continue;
        }
        if (!same_shape(store, x, y))
            return false;
        if (!store.is_structure(x))
            continue;
        if (!visited.insert({x, y}).second)
            continue;
        for (auto i = store.child_count(x); i > 0; --i)
            work.emplace_back(store.child(x, i - 1), store.child(y, i - 1));
    }
    return true;
}

bool is_acyclic(const CellStore &store, CellRef a)
{
    enum class Colour : std::uint8_t { grey, black };
    std::unordered_map<CellRef, Colour, CellRefHash> colour;
    // (cell, next child index) frames of an explicit DFS.
    std::vector<std::pair<CellRef, std::uint32_t>> path;
    auto root = store.deref(a);
    if (!store.is_structure(root))
        return true;
    colour[root] = Colour::grey;
    path.emplace_back(root, 0);
    while (!path.empty()) {
        auto &[cell, next] = path.back();
        if (next == store.child_count(cell)) {
            colour[cell] = Colour::black;
            path.pop_back();
            continue;
        }
        auto c = store.deref(store.child(cell, next++));
        if (!store.is_structure(c))
            continue;
        auto it = colour.find(c);
        if (it == colour.end()) {
            colour[c] = Colour::grey;
            path.emplace_back(c, 0);
        } else if (it->second == Colour::grey) {
            return false;
        }
    }
    return true;
}

std::size_t reachable_cells(const CellStore &store, CellRef a)
{
    std::unordered_set<CellRef, CellRefHash> seen;
    std::vector<CellRef> work{a};
    while (!work.empty()) {
        auto r = work.back();
        work.pop_back();
        // Count the variable cells on the way too: they are part of the
        // representation.
        while (true) {
            if (!seen.insert(r).second)
                break;
            const auto &c = store.cell(r);
            if (c.kind == CellKind::Var && c.first != CellRef::none) {
                r = CellRef{c.first};
                continue;
            }
            if (store.is_structure(r))
                for (std::uint32_t i = 0; i < store.child_count(r); ++i)
                    work.push_back(store.child(r, i));
            break;
        }
    }
    return seen.size();
}

std::vector<CellRef> univ(CellStore &store, CellRef a)
{
    auto t = store.deref(a);
    const auto &c = store.cell(t);
    switch (c.kind) {
    case CellKind::Var:
        throw PrologError(PrologError::Kind::instantiation, "=..: unbound variable");
    case CellKind::Atom:
    case CellKind::Int:
        return {t};
    case CellKind::Pair: {
        auto head = store.head(t);
        auto tail = store.tail(t);
        return {store.new_atom(store.dot_symbol()), head, tail};
    }
    case CellKind::Compound: {
        std::vector<CellRef> out;
        auto functor = static_cast<SymbolId>(c.value);
        auto arity = c.arity;
        out.reserve(arity + 1);
        out.push_back(store.new_atom(functor));
        for (std::uint32_t i = 0; i < arity; ++i)
            out.push_back(store.arg(t, i));
        return out;
    }
    }
    return {};
}

CellRef univ_inverse(CellStore &store, std::span<const CellRef> parts)
{
    if (parts.empty())
        throw PrologError(PrologError::Kind::construction, "=..: empty list");
    auto name = store.deref(parts[0]);
    if (store.is_unbound(name))
        throw PrologError(PrologError::Kind::instantiation, "=..: unbound functor");
    if (parts.size() == 1) {
        if (!store.is_atomic(name))
            throw PrologError(PrologError::Kind::type, "=..: atomic expected");
        return name;
    }
    if (store.kind(name) != CellKind::Atom)
        throw PrologError(PrologError::Kind::type, "=..: atom expected as functor");
    auto functor = store.symbol(name);
    if (functor == store.dot_symbol() && parts.size() == 3)
        return store.new_pair(parts[1], parts[2]);
    return store.new_compound(functor, parts.subspan(1));
}

bool equal_to_depth(const CellStore &store, CellRef a, CellRef b, std::size_t depth)
{
    // Memo of the deepest depth at which a pair is known equal and the
    // shallowest at which it is known different.
    std::unordered_map<CellPair, std::size_t, CellPairHash> equal_upto;
    std::unordered_map<CellPair, std::size_t, CellPairHash> differ_at;

    auto go = [&](auto &self, CellRef x, CellRef y, std::size_t d) -> bool {
        if (d == 0)
            return true;
        x = store.deref(x);
        y = store.deref(y);
        if (store.is_var(x) || store.is_var(y))
            return x == y;
        if (!same_shape(store, x, y))
            return false;
        if (!store.is_structure(x))
            return true;
        CellPair key{x, y};
        if (auto it = equal_upto.find(key); it != equal_upto.end() && it->second >= d)
            return true;
        if (auto it = differ_at.find(key); it != differ_at.end() && it->second <= d)
            return false;
        bool eq = true;
        for (std::uint32_t i = 0; i < store.child_count(x) && eq; ++i)
            eq = self(self, store.child(x, i), store.child(y, i), d - 1);
        if (eq) {
            auto &e = equal_upto[key];
            e = std::max(e, d);
        } else {
            auto [it, inserted] = differ_at.emplace(key, d);
            if (!inserted)
                it->second = std::min(it->second, d);
        }
        return eq;
    };
    return go(go, a, b, depth);
}

bool bisimilar(const CellStore &store, CellRef a, CellRef b)
{
    auto depth = reachable_cells(store, a) * reachable_cells(store, b) + 1;
    return equal_to_depth(store, a, b, depth);
}

} // namespace cycletab
