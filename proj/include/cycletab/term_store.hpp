#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cycletab {

//
// Terms live in one append-only arena per engine. A cell is identified by
// its index. Cycles appear when a variable cell is bound to an enclosing
// pair or compound cell, or when a structure cell directly points back at
// one of its ancestors.
//

struct CellRef {
    static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t index = none;

    constexpr bool valid() const { return index != none; }
    friend constexpr bool operator==(CellRef, CellRef) = default;
    friend constexpr auto operator<=>(CellRef, CellRef) = default;
};

using SymbolId = std::uint32_t;

enum class CellKind : std::uint8_t { Var, Atom, Int, Pair, Compound };

struct Cell {
    CellKind kind = CellKind::Var;
    std::uint32_t arity = 0;
    // Atom/Compound: symbol id. Int: the value.
    std::int64_t value = 0;
    // Var: binding. Pair: head. Compound: offset of the first argument slot.
    std::uint32_t first = CellRef::none;
    // Pair: tail.
    std::uint32_t second = CellRef::none;
};

class SymbolTable {
public:
    SymbolId intern(std::string_view name);
    const std::string &name(SymbolId id) const { return names_.at(id); }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, SymbolId> ids_;
};

class Trail {
public:
    std::size_t size() const { return entries_.size(); }
    void push(CellRef var) { entries_.push_back(var); }
    const std::vector<CellRef> &entries() const { return entries_; }

private:
    friend class CellStore;
    std::vector<CellRef> entries_;
};

// Position in the store and trail that undo_to can return to.
struct Mark {
    std::size_t trail = 0;
    std::size_t cells = 0;
    std::size_t args = 0;
};

class CellStore {
public:
    CellStore();

    SymbolTable &symbols() { return symbols_; }
    const SymbolTable &symbols() const { return symbols_; }
    SymbolId intern(std::string_view name) { return symbols_.intern(name); }
    const std::string &symbol_name(SymbolId id) const { return symbols_.name(id); }

    // Symbols every engine relies on.
    SymbolId nil_symbol() const { return nil_; }
    SymbolId dot_symbol() const { return dot_; }

    CellRef new_var();
    CellRef new_atom(SymbolId symbol);
    CellRef new_atom(std::string_view name) { return new_atom(intern(name)); }
    CellRef new_int(std::int64_t value);
    CellRef new_pair(CellRef head, CellRef tail);
    CellRef new_compound(SymbolId functor, std::span<const CellRef> args);
    // Argument slots are left invalid; fill them with set_arg before use.
    CellRef new_compound(SymbolId functor, std::uint32_t arity);
    CellRef new_nil() { return new_atom(nil_); }

    // Construction-time mutation, not trailed. Only for cells that nothing
    // else refers to yet (builders and reconstruction).
    void set_arg(CellRef compound, std::uint32_t i, CellRef value);
    void set_pair(CellRef pair, CellRef head, CellRef tail);
    // Child i of a pair (0 head, 1 tail) or compound.
    void set_child(CellRef structure, std::uint32_t i, CellRef value);
    // Pair with both slots unset.
    CellRef new_open_pair() { return new_pair(CellRef{}, CellRef{}); }

    const Cell &cell(CellRef r) const { return cells_[r.index]; }
    std::size_t size() const { return cells_.size(); }
    bool contains(CellRef r) const { return r.index < cells_.size(); }

    CellKind kind(CellRef r) const { return cells_[r.index].kind; }
    bool is_var(CellRef r) const { return kind(r) == CellKind::Var; }
    bool is_unbound(CellRef r) const {
        return kind(r) == CellKind::Var && cells_[r.index].first == CellRef::none;
    }
    bool is_structure(CellRef r) const {
        auto k = kind(r);
        return k == CellKind::Pair || k == CellKind::Compound;
    }
    bool is_atomic(CellRef r) const {
        auto k = kind(r);
        return k == CellKind::Atom || k == CellKind::Int;
    }

    SymbolId symbol(CellRef r) const { return static_cast<SymbolId>(cells_[r.index].value); }
    std::int64_t int_value(CellRef r) const { return cells_[r.index].value; }
    std::uint32_t arity(CellRef r) const;
    CellRef arg(CellRef r, std::uint32_t i) const;
    CellRef head(CellRef pair) const { return CellRef{cells_[pair.index].first}; }
    CellRef tail(CellRef pair) const { return CellRef{cells_[pair.index].second}; }
    // Children of a Pair (head, tail) or Compound (args), in order.
    std::uint32_t child_count(CellRef r) const;
    CellRef child(CellRef r, std::uint32_t i) const;

    CellRef deref(CellRef r) const;

    // v must dereference to an unbound variable.
    void bind(Trail &trail, CellRef v, CellRef t);
    Mark mark(const Trail &trail) const { return Mark{trail.size(), cells_.size(), args_.size()}; }
    // Unbinds everything trailed after the mark and drops cells created
    // after it.
    void undo_to(Trail &trail, const Mark &m);

    bool is_atom(CellRef r, SymbolId s) const {
        return kind(r) == CellKind::Atom && symbol(r) == s;
    }
    bool is_nil(CellRef r) const { return is_atom(r, nil_); }

    // Convenience for building proper lists.
    CellRef make_list(std::span<const CellRef> items, CellRef tail);
    CellRef make_list(std::span<const CellRef> items) { return make_list(items, new_nil()); }

private:
    std::vector<Cell> cells_;
    std::vector<CellRef> args_;
    SymbolTable symbols_;
    SymbolId nil_ = 0;
    SymbolId dot_ = 0;
};

// Hash for pairs of cell refs, used by the co-traversal memo tables.
struct CellPairHash {
    std::size_t operator()(const std::pair<CellRef, CellRef> &p) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t{p.first.index} << 32) | p.second.index);
    }
};

struct CellRefHash {
    std::size_t operator()(CellRef r) const noexcept { return std::hash<std::uint32_t>{}(r.index); }
};

} // namespace cycletab
