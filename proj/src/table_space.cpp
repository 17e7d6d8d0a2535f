#include "cycletab/table_space.hpp"

#include "cycletab/errors.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace cycletab {

NodeId TableSpace::new_root()
{
    nodes_.push_back(TrieNode{});
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId TableSpace::child(NodeId parent, const Token &t, bool &created)
{
    for (auto c : nodes_[parent].children)
        if (nodes_[c].token == t)
            return c;
    TrieNode n;
    n.token = t;
    n.parent = parent;
    n.depth = nodes_[parent].depth + 1;
    nodes_.push_back(std::move(n));
    auto id = static_cast<NodeId>(nodes_.size() - 1);
    nodes_[parent].children.push_back(id);
    created = true;
    return id;
}

bool TableSpace::is_ancestor(NodeId candidate, NodeId of) const
{
    for (auto n = nodes_[of].parent; n != no_node; n = nodes_[n].parent)
        if (n == candidate)
            return true;
    return false;
}

InsertResult TableSpace::check_insert_term(const CellStore &store, NodeId from, CellRef t,
                                           VarNumbering &vars)
{
    struct Item {
        CellRef cell;
        bool exit;
    };
    std::vector<Item> work{{t, false}};
    // Structure cells on the current term path and the node of their token.
    std::unordered_map<CellRef, NodeId, CellRefHash> on_path;
    NodeId cur = from;
    bool created = false;
    while (!work.empty()) {
        auto item = work.back();
        work.pop_back();
        if (item.exit) {
            on_path.erase(item.cell);
            continue;
        }
        auto c = store.deref(item.cell);
        const auto &cell = store.cell(c);
        switch (cell.kind) {
        case CellKind::Var: {
            auto [it, fresh] = vars.ordinal.emplace(c, static_cast<std::uint32_t>(vars.vars.size()));
            if (fresh)
                vars.vars.push_back(c);
            cur = child(cur, Token::var(it->second), created);
            break;
        }
        case CellKind::Atom:
            cur = child(cur, Token::atom(store.symbol(c)), created);
            break;
        case CellKind::Int:
            cur = child(cur, Token::integer(cell.value), created);
            break;
        case CellKind::Pair:
        case CellKind::Compound: {
            if (auto hit = on_path.find(c); hit != on_path.end()) {
                assert(is_ancestor(hit->second, cur) || hit->second == cur);
                cur = child(cur, Token::ratref(hit->second), created);
                break;
            }
            auto tok = cell.kind == CellKind::Pair ? Token::pair()
                                                   : Token::functor(store.symbol(c), cell.arity);
            cur = child(cur, tok, created);
            on_path.emplace(c, cur);
            work.push_back({c, true});
            for (auto i = store.child_count(c); i > 0; --i)
                work.push_back({store.child(c, i - 1), false});
            break;
        }
        }
    }
    return {cur, created};
}

TableEntry &TableSpace::entry(std::uint32_t predicate)
{
    auto it = entries_.find(predicate);
    if (it == entries_.end())
        it = entries_.emplace(predicate, TableEntry{predicate, new_root()}).first;
    return it->second;
}

SubgoalLookup TableSpace::subgoal_check_insert(TableEntry &entry, std::span<const CellRef> args,
                                               const CellStore &store)
{
    VarNumbering vars;
    NodeId leaf = entry.subgoal_root;
    for (auto a : args)
        leaf = check_insert_term(store, leaf, a, vars).leaf;
    SubgoalLookup out;
    out.factor = std::move(vars.vars);
    if (nodes_[leaf].frame >= 0) {
        out.frame = frames_[static_cast<std::size_t>(nodes_[leaf].frame)].get();
        return out;
    }
    auto f = std::make_unique<SubgoalFrame>();
    f->id = static_cast<std::uint32_t>(frames_.size());
    f->predicate = entry.predicate;
    f->subgoal_leaf = leaf;
    f->answer_root = new_root();
    f->subst_arity = static_cast<std::uint32_t>(out.factor.size());
    nodes_[leaf].frame = static_cast<std::int32_t>(f->id);
    out.frame = f.get();
    out.is_new = true;
    frames_.push_back(std::move(f));
    return out;
}

InsertResult TableSpace::answer_check_insert(SubgoalFrame &frame, std::span<const CellRef> terms,
                                             const CellStore &store)
{
    if (terms.size() != frame.subst_arity)
        throw std::logic_error("answer arity does not match the substitution factor");
    VarNumbering vars;
    NodeId leaf = frame.answer_root;
    bool created = false;
    for (auto t : terms) {
        auto r = check_insert_term(store, leaf, t, vars);
        leaf = r.leaf;
        created = created || r.is_new;
    }
    // An answer with no substitution terms (a ground call) is the root
    // itself; it is new the first time only.
    if (terms.empty())
        created = frame.answer_leaves.empty();
    if (created) {
        frame.answer_leaves.push_back(leaf);
        ++answers_;
    }
    return {leaf, created};
}

std::vector<Token> TableSpace::path_tokens(NodeId leaf) const
{
    std::vector<Token> out;
    for (auto n = leaf; nodes_[n].parent != no_node; n = nodes_[n].parent)
        out.push_back(nodes_[n].token);
    return {out.rbegin(), out.rend()};
}

std::vector<CellRef> TableSpace::reconstruct(NodeId leaf, CellStore &store, Trail &trail) const
{
    std::vector<NodeId> path;
    for (auto n = leaf; nodes_[n].parent != no_node; n = nodes_[n].parent)
        path.push_back(n);
    std::reverse(path.begin(), path.end());

    std::unordered_map<NodeId, CellRef> node_cell;
    std::vector<std::pair<CellRef, NodeId>> pending;  // (fresh var, target node)
    std::vector<CellRef> var_cells;
    std::vector<CellRef> results;

    struct Slot {
        CellRef parent;  // invalid for a top-level term
        std::uint32_t index;
    };
    std::size_t next = 0;
    while (next < path.size()) {
        std::vector<Slot> slots{{CellRef{}, 0}};
        while (!slots.empty()) {
            auto slot = slots.back();
            slots.pop_back();
            if (next >= path.size())
                throw TableCorruption("trie path ends inside a term");
            auto id = path[next++];
            const auto &tok = nodes_[id].token;
            CellRef cell;
            switch (tok.kind) {
            case TokenKind::Atom:
                cell = store.new_atom(static_cast<SymbolId>(tok.value));
                break;
            case TokenKind::Int:
                cell = store.new_int(tok.value);
                break;
            case TokenKind::Var: {
                auto ord = static_cast<std::size_t>(tok.value);
                while (var_cells.size() <= ord)
                    var_cells.push_back(store.new_var());
                cell = var_cells[ord];
                break;
            }
            case TokenKind::Pair:
                cell = store.new_open_pair();
                node_cell.emplace(id, cell);
                break;
            case TokenKind::Functor:
                cell = store.new_compound(static_cast<SymbolId>(tok.value), tok.arity);
                node_cell.emplace(id, cell);
                break;
            case TokenKind::RatRef:
                cell = store.new_var();
                pending.emplace_back(cell, static_cast<NodeId>(tok.value));
                if (!is_ancestor(static_cast<NodeId>(tok.value), id))
                    throw TableCorruption("rational reference to a node off the path");
                break;
            }
            if (slot.parent.valid())
                store.set_child(slot.parent, slot.index, cell);
            else
                results.push_back(cell);
            if (tok.kind == TokenKind::Pair || tok.kind == TokenKind::Functor)
                for (auto i = tok.arity; i > 0; --i)
                    slots.push_back({cell, i - 1});
        }
    }
    // Deferred binding: every target precedes its reference on the path, so
    // its cell exists by now.
    for (auto [var, target] : pending) {
        auto it = node_cell.find(target);
        if (it == node_cell.end())
            throw TableCorruption("rational reference to a non-structure node");
        store.bind(trail, var, it->second);
    }
    return results;
}

std::string TableSpace::token_text(const Token &t, const SymbolTable &symbols) const
{
    switch (t.kind) {
    case TokenKind::Atom:
        return symbols.name(static_cast<SymbolId>(t.value));
    case TokenKind::Int:
        return std::to_string(t.value);
    case TokenKind::Var:
        return "VAR" + std::to_string(t.value);
    case TokenKind::Pair:
        return "PAIR";
    case TokenKind::Functor:
        return symbols.name(static_cast<SymbolId>(t.value)) + "/" + std::to_string(t.arity);
    case TokenKind::RatRef:
        return "RT_PTR";
    }
    return "?";
}

std::string TableSpace::dump(NodeId root, const SymbolTable &symbols) const
{
    std::ostringstream out;
    std::unordered_map<NodeId, std::size_t> line_of;
    std::vector<NodeId> work;
    for (auto it = nodes_[root].children.rbegin(); it != nodes_[root].children.rend(); ++it)
        work.push_back(*it);
    auto base = nodes_[root].depth + 1;
    while (!work.empty()) {
        auto n = work.back();
        work.pop_back();
        line_of.emplace(n, line_of.size());
        const auto &node = nodes_[n];
        out << (node.depth - base) << ' ' << token_text(node.token, symbols);
        if (node.token.kind == TokenKind::RatRef)
            out << " ->" << line_of.at(static_cast<NodeId>(node.token.value));
        out << '\n';
        for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
            work.push_back(*it);
    }
    return out.str();
}

bool TableSpace::rational_refs_valid(NodeId root) const
{
    std::vector<NodeId> work{root};
    while (!work.empty()) {
        auto n = work.back();
        work.pop_back();
        const auto &node = nodes_[n];
        if (node.token.kind == TokenKind::RatRef && n != root) {
            auto target = static_cast<NodeId>(node.token.value);
            if (target >= nodes_.size() || !is_ancestor(target, n))
                return false;
            auto k = nodes_[target].token.kind;
            if (k != TokenKind::Pair && k != TokenKind::Functor)
                return false;
        }
        for (auto c : node.children)
            work.push_back(c);
    }
    return true;
}

} // namespace cycletab
