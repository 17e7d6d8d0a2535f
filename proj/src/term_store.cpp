#include "cycletab/term_store.hpp"

#include <cassert>

namespace cycletab {

SymbolId SymbolTable::intern(std::string_view name)
{
    auto it = ids_.find(std::string(name));
    if (it != ids_.end())
        return it->second;
    auto id = static_cast<SymbolId>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

CellStore::CellStore()
{
    nil_ = symbols_.intern("[]");
    dot_ = symbols_.intern(".");
}

CellRef CellStore::new_var()
{
    cells_.push_back(Cell{CellKind::Var, 0, 0, CellRef::none, CellRef::none});
    return CellRef{static_cast<std::uint32_t>(cells_.size() - 1)};
}

CellRef CellStore::new_atom(SymbolId symbol)
{
    cells_.push_back(Cell{CellKind::Atom, 0, symbol, CellRef::none, CellRef::none});
    return CellRef{static_cast<std::uint32_t>(cells_.size() - 1)};
}

CellRef CellStore::new_int(std::int64_t value)
{
    cells_.push_back(Cell{CellKind::Int, 0, value, CellRef::none, CellRef::none});
    return CellRef{static_cast<std::uint32_t>(cells_.size() - 1)};
}

CellRef CellStore::new_pair(CellRef head, CellRef tail)
{
    cells_.push_back(Cell{CellKind::Pair, 2, 0, head.index, tail.index});
    return CellRef{static_cast<std::uint32_t>(cells_.size() - 1)};
}

CellRef CellStore::new_compound(SymbolId functor, std::span<const CellRef> args)
{
    auto c = new_compound(functor, static_cast<std::uint32_t>(args.size()));
    auto offset = cells_[c.index].first;
    for (std::size_t i = 0; i < args.size(); ++i)
        args_[offset + i] = args[i];
    return c;
}

CellRef CellStore::new_compound(SymbolId functor, std::uint32_t arity)
{
    if (arity == 0)
        throw std::invalid_argument("compound terms need arity >= 1");
    auto offset = static_cast<std::uint32_t>(args_.size());
    args_.resize(args_.size() + arity);
    cells_.push_back(Cell{CellKind::Compound, arity, functor, offset, CellRef::none});
    return CellRef{static_cast<std::uint32_t>(cells_.size() - 1)};
}

void CellStore::set_arg(CellRef compound, std::uint32_t i, CellRef value)
{
    const auto &c = cells_[compound.index];
    assert(c.kind == CellKind::Compound && i < c.arity);
    args_[c.first + i] = value;
}

void CellStore::set_pair(CellRef pair, CellRef head, CellRef tail)
{
    auto &c = cells_[pair.index];
    assert(c.kind == CellKind::Pair);
    c.first = head.index;
    c.second = tail.index;
}

void CellStore::set_child(CellRef structure, std::uint32_t i, CellRef value)
{
    auto &c = cells_[structure.index];
    if (c.kind == CellKind::Pair) {
        (i == 0 ? c.first : c.second) = value.index;
        return;
    }
    assert(c.kind == CellKind::Compound && i < c.arity);
    args_[c.first + i] = value;
}

std::uint32_t CellStore::arity(CellRef r) const
{
    const auto &c = cells_[r.index];
    return c.kind == CellKind::Compound || c.kind == CellKind::Pair ? c.arity : 0;
}

CellRef CellStore::arg(CellRef r, std::uint32_t i) const
{
    const auto &c = cells_[r.index];
    assert(c.kind == CellKind::Compound && i < c.arity);
    return args_[c.first + i];
}

std::uint32_t CellStore::child_count(CellRef r) const
{
    return arity(r);
}

CellRef CellStore::child(CellRef r, std::uint32_t i) const
{
    const auto &c = cells_[r.index];
    if (c.kind == CellKind::Pair)
        return CellRef{i == 0 ? c.first : c.second};
    return args_[c.first + i];
}

CellRef CellStore::deref(CellRef r) const
{
    while (true) {
        const auto &c = cells_[r.index];
        if (c.kind != CellKind::Var || c.first == CellRef::none)
            return r;
        r = CellRef{c.first};
    }
}

void CellStore::bind(Trail &trail, CellRef v, CellRef t)
{
    auto &c = cells_[v.index];
    if (c.kind != CellKind::Var || c.first != CellRef::none)
        throw std::logic_error("bind: target is not an unbound variable");
    if (v == t)
        throw std::logic_error("bind: variable bound to itself");
    c.first = t.index;
    trail.push(v);
}

void CellStore::undo_to(Trail &trail, const Mark &m)
{
    if (m.trail > trail.entries_.size() || m.cells > cells_.size() || m.args > args_.size())
        throw std::logic_error("undo_to: stale mark");
    for (auto i = trail.entries_.size(); i > m.trail; --i) {
        auto v = trail.entries_[i - 1];
        if (v.index < cells_.size())
            cells_[v.index].first = CellRef::none;
    }
    trail.entries_.resize(m.trail);
    cells_.resize(m.cells);
    args_.resize(m.args);
}

CellRef CellStore::make_list(std::span<const CellRef> items, CellRef tail)
{
    CellRef result = tail;
    for (auto it = items.rbegin(); it != items.rend(); ++it)
        result = new_pair(*it, result);
    return result;
}

} // namespace cycletab
