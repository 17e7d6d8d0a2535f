#pragma once

#include "cycletab/term_store.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace cycletab {

//
// Two-level trie table space. Subgoal tries hold the argument terms of
// tabled calls (the predicate itself is implicit in its table entry) and
// end in a subgoal frame; each frame owns an answer trie holding only the
// substitution terms for the free variables of the call.
//
// Rational terms are stored finitely: when insertion meets a pair/compound
// cell that is already on the path being inserted, it emits a RatRef token
// pointing back at the trie node of that cell instead of descending again.
//

using NodeId = std::uint32_t;
inline constexpr NodeId no_node = ~NodeId{0};

enum class TokenKind : std::uint8_t { Atom, Int, Var, Pair, Functor, RatRef };

struct Token {
    TokenKind kind = TokenKind::Atom;
    // Atom/Functor: symbol. Int: value. Var: ordinal. RatRef: target node.
    std::int64_t value = 0;
    std::uint32_t arity = 0;

    static Token atom(SymbolId s) { return {TokenKind::Atom, s, 0}; }
    static Token integer(std::int64_t v) { return {TokenKind::Int, v, 0}; }
    static Token var(std::uint32_t ordinal) { return {TokenKind::Var, ordinal, 0}; }
    static Token pair() { return {TokenKind::Pair, 0, 2}; }
    static Token functor(SymbolId s, std::uint32_t arity) { return {TokenKind::Functor, s, arity}; }
    static Token ratref(NodeId target) { return {TokenKind::RatRef, target, 0}; }

    friend bool operator==(const Token &, const Token &) = default;
};

struct TrieNode {
    Token token;
    NodeId parent = no_node;
    std::uint32_t depth = 0;  // root is 0
    std::vector<NodeId> children;
    std::int32_t frame = -1;  // subgoal leaves: index of the frame
};

// Unbound variables of one inserted call/answer, numbered VAR0, VAR1, ...
// in first-occurrence order.
struct VarNumbering {
    std::vector<CellRef> vars;
    std::unordered_map<CellRef, std::uint32_t, CellRefHash> ordinal;
};

using SubstitutionFactor = std::vector<CellRef>;

enum class FrameStatus : std::uint8_t { evaluating, complete };

struct SubgoalFrame {
    std::uint32_t id = 0;
    std::uint32_t predicate = 0;
    FrameStatus status = FrameStatus::evaluating;
    NodeId subgoal_leaf = no_node;
    NodeId answer_root = no_node;
    std::vector<NodeId> answer_leaves;  // insertion order
    std::uint32_t subst_arity = 0;

    // Scheduling state owned by the engine.
    bool active = false;          // a generator for this frame is running
    bool on_completion_stack = false;
    std::uint64_t stamp = 0;      // pass token of the last evaluation
};

struct TableEntry {
    std::uint32_t predicate = 0;
    NodeId subgoal_root = no_node;
};

struct InsertResult {
    NodeId leaf = no_node;
    bool is_new = false;
};

struct SubgoalLookup {
    SubgoalFrame *frame = nullptr;
    SubstitutionFactor factor;
    bool is_new = false;
};

class TableSpace {
public:
    TableSpace() = default;
    TableSpace(const TableSpace &) = delete;
    TableSpace &operator=(const TableSpace &) = delete;

    NodeId new_root();
    const TrieNode &node(NodeId id) const { return nodes_[id]; }
    std::size_t node_count() const { return nodes_.size(); }

    // Inserts t below `from`, continuing the numbering in vars.
    InsertResult check_insert_term(const CellStore &store, NodeId from, CellRef t,
                                   VarNumbering &vars);

    TableEntry &entry(std::uint32_t predicate);
    bool has_entry(std::uint32_t predicate) const { return entries_.count(predicate) != 0; }

    SubgoalLookup subgoal_check_insert(TableEntry &entry, std::span<const CellRef> args,
                                       const CellStore &store);

    // substitution terms must number frame.subst_arity.
    InsertResult answer_check_insert(SubgoalFrame &frame, std::span<const CellRef> terms,
                                     const CellStore &store);

    // Rebuilds the terms spelled by the path root -> leaf. RatRef tokens get
    // a fresh variable that is bound to the target's term once everything is
    // built. Throws TableCorruption on a RatRef whose target is not an
    // ancestor structure node.
    std::vector<CellRef> reconstruct(NodeId leaf, CellStore &store, Trail &trail) const;

    SubgoalFrame &frame(std::uint32_t id) { return *frames_[id]; }
    const SubgoalFrame &frame(std::uint32_t id) const { return *frames_[id]; }
    std::size_t frame_count() const { return frames_.size(); }

    // Total answers ever inserted, across all frames.
    std::uint64_t answer_count() const { return answers_; }

    // Tokens on the path root -> leaf, root excluded.
    std::vector<Token> path_tokens(NodeId leaf) const;

    // One line per node in pre-order: "depth token [->targetId]", where ids
    // are line numbers from 0 and the root is not printed.
    std::string dump(NodeId root, const SymbolTable &symbols) const;

    // Checks every RatRef below root: its target is an ancestor holding a
    // Pair or Functor token.
    bool rational_refs_valid(NodeId root) const;

    std::string token_text(const Token &t, const SymbolTable &symbols) const;

private:
    std::vector<TrieNode> nodes_;
    std::vector<std::unique_ptr<SubgoalFrame>> frames_;
    std::unordered_map<std::uint32_t, TableEntry> entries_;
    std::uint64_t answers_ = 0;

    NodeId child(NodeId parent, const Token &t, bool &created);
    bool is_ancestor(NodeId candidate, NodeId of) const;
};

} // namespace cycletab
