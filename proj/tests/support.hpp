#pragma once

// Test helpers: random possibly-cyclic terms and oracles that do not share
// code with the library's relational operations.

#include "cycletab/engine.hpp"
#include "cycletab/term_store.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace cycletab;

// Union-find over cell indices.
struct UnionFind {
    std::map<std::uint32_t, std::uint32_t> parent;
    std::uint32_t find(std::uint32_t x)
    {
        auto it = parent.find(x);
        if (it == parent.end() || it->second == x)
            return x;
        auto r = find(it->second);
        parent[x] = r;
        return r;
    }
    void join(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

// Follows bindings without the library's deref.
inline CellRef walk(const CellStore &s, CellRef r)
{
    while (s.cell(r).kind == CellKind::Var && s.cell(r).first != CellRef::none)
        r = CellRef{s.cell(r).first};
    return r;
}

inline std::vector<CellRef> kids(const CellStore &s, CellRef r)
{
    std::vector<CellRef> out;
    const auto &c = s.cell(r);
    if (c.kind == CellKind::Pair) {
        out.push_back(CellRef{c.first});
        out.push_back(CellRef{c.second});
    } else if (c.kind == CellKind::Compound) {
        for (std::uint32_t i = 0; i < c.arity; ++i)
            out.push_back(s.arg(r, i));
    }
    return out;
}

inline bool same_label(const CellStore &s, CellRef a, CellRef b)
{
    const auto &x = s.cell(a);
    const auto &y = s.cell(b);
    if (x.kind != y.kind)
        return false;
    switch (x.kind) {
    case CellKind::Var:
        return a == b;
    case CellKind::Atom:
    case CellKind::Int:
        return x.value == y.value;
    case CellKind::Pair:
        return true;
    case CellKind::Compound:
        return x.value == y.value && x.arity == y.arity;
    }
    return false;
}

// Hopcroft-Karp style equivalence of the rational trees rooted at a and b.
// Unbound variables are equal only to themselves.
inline bool oracle_equal(const CellStore &s, CellRef a, CellRef b)
{
    UnionFind uf;
    std::vector<std::pair<CellRef, CellRef>> todo{{a, b}};
    while (!todo.empty()) {
        auto [x, y] = todo.back();
        todo.pop_back();
        x = walk(s, x);
        y = walk(s, y);
        if (uf.find(x.index) == uf.find(y.index))
            continue;
        if (!same_label(s, x, y))
            return false;
        uf.join(x.index, y.index);
        auto kx = kids(s, x);
        auto ky = kids(s, y);
        for (std::size_t i = 0; i < kx.size(); ++i)
            todo.emplace_back(kx[i], ky[i]);
    }
    return true;
}

// Huet-style unifiability on rational trees: merge classes, and fail when
// a class would hold two structures with different labels.
inline bool oracle_unifiable(const CellStore &s, CellRef a, CellRef b)
{
    UnionFind uf;
    std::map<std::uint32_t, CellRef> rep;  // class -> a non-variable member
    auto nonvar_of = [&](CellRef x) -> CellRef {
        auto it = rep.find(uf.find(x.index));
        if (it != rep.end())
            return it->second;
        return s.cell(x).kind == CellKind::Var ? CellRef{} : x;
    };
    std::vector<std::pair<CellRef, CellRef>> todo{{a, b}};
    while (!todo.empty()) {
        auto [x, y] = todo.back();
        todo.pop_back();
        x = walk(s, x);
        y = walk(s, y);
        auto rx = uf.find(x.index);
        auto ry = uf.find(y.index);
        if (rx == ry)
            continue;
        auto nx = nonvar_of(x);
        auto ny = nonvar_of(y);
        uf.join(x.index, y.index);
        auto r = uf.find(x.index);
        if (nx.valid() && ny.valid()) {
            if (!same_label(s, nx, ny))
                return false;
            rep[r] = nx;
            auto kx = kids(s, nx);
            auto ky = kids(s, ny);
            for (std::size_t i = 0; i < kx.size(); ++i)
                todo.emplace_back(kx[i], ky[i]);
        } else if (nx.valid()) {
            rep[r] = nx;
        } else if (ny.valid()) {
            rep[r] = ny;
        }
    }
    return true;
}

// Random term with at most max_cells cells. Structure children point at
// any cell of the term, so cycles are common.
struct TermGen {
    std::mt19937 rng;
    explicit TermGen(unsigned seed) : rng(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    CellRef make(CellStore &s, int max_cells, bool allow_vars = true)
    {
        int n = 1 + pick(max_cells);
        std::vector<CellRef> cells;
        std::vector<CellRef> structures;
        // The root is a structure when there is room for children.
        for (int i = 0; i < n; ++i) {
            int kind = (i == 0 && n > 1) ? 3 + pick(3) : pick(allow_vars ? 7 : 6);
            CellRef c;
            switch (kind) {
            case 0:
                c = s.new_atom(pick(2) ? "a" : "b");
                break;
            case 1:
                c = s.new_int(1 + pick(2));
                break;
            case 2:
                c = s.new_atom("[]");
                break;
            case 3:
                c = s.new_open_pair();
                structures.push_back(c);
                break;
            case 4:
                c = s.new_compound(s.intern("f"), 1);
                structures.push_back(c);
                break;
            case 5:
                c = s.new_compound(s.intern("g"), 2);
                structures.push_back(c);
                break;
            default:
                c = s.new_var();
                break;
            }
            cells.push_back(c);
        }
        for (auto st : structures)
            for (std::uint32_t i = 0; i < s.child_count(st); ++i)
                s.set_child(st, i, cells[static_cast<std::size_t>(pick(n))]);
        return cells[0];
    }
};

// Every answer of `query` against `program`, printed.
struct RunResult {
    std::vector<std::string> answers;
    SolveStatus status = SolveStatus::exhausted;
};

inline RunResult run_query(Engine &e, const std::string &query, std::size_t cap = 1000)
{
    RunResult r;
    auto q = e.query(query);
    while (r.answers.size() < cap) {
        auto st = q->next();
        if (st != SolveStatus::answer) {
            r.status = st;
            return r;
        }
        r.answers.push_back(q->answer_text().text());
    }
    return r;
}

inline RunResult run_program(const std::string &program, const std::string &query,
                             EngineOptions opts = {}, std::size_t cap = 1000)
{
    Engine e(opts);
    e.consult(program);
    return run_query(e, query, cap);
}

// Reads a file from the test program corpus.
inline std::string program_text(const std::string &name)
{
    std::ifstream in(std::string(CYCLETAB_PROGRAMS_DIR) + "/" + name);
    if (!in)
        throw std::runtime_error("missing test program " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Unfolds a list term into its first n elements (printed); stops at a
// non-list tail.
inline std::vector<std::string> unfold_list(const CellStore &s, CellRef l, std::size_t n,
                                            std::function<std::string(CellRef)> show)
{
    std::vector<std::string> out;
    l = walk(s, l);
    while (out.size() < n && s.cell(l).kind == CellKind::Pair) {
        out.push_back(show(walk(s, s.head(l))));
        l = walk(s, s.tail(l));
    }
    return out;
}

} // namespace testsupport
