// Acceptance run: one PASS/FAIL line per criterion.

#include "cycletab/bench.hpp"
#include "cycletab/canonical.hpp"
#include "cycletab/engine.hpp"
#include "cycletab/printer.hpp"
#include "cycletab/rational_ops.hpp"
#include "cycletab/reader.hpp"
#include "cycletab/table_space.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace cycletab;
using testsupport::oracle_equal;
using testsupport::program_text;
using testsupport::run_program;
using Answers = std::vector<std::string>;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream why;

    void expect(bool cond, const std::string &what)
    {
        if (!cond && ok) {
            ok = false;
            why << what;
        }
    }
};

int failures = 0;

void criterion(int id, const std::string &title, double limit, const std::function<void(Check &)> &body)
{
    Check c;
    auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception &e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs < limit, "took " + std::to_string(secs) + " s");
    std::printf("%s %d: %s (%.3f s)", c.ok ? "PASS" : "FAIL", id, title.c_str(), secs);
    if (!c.ok) {
        std::printf(" -- %s", c.why.str().c_str());
        ++failures;
    }
    std::printf("\n");
    std::fflush(stdout);
}

std::string join(const Answers &a)
{
    std::string out;
    for (auto &s : a)
        out += "[" + s + "] ";
    return out;
}

// Rebuilds a printed answer as label terms in `s`.
std::map<std::string, CellRef> rebuild(CellStore &s, const std::string &answer)
{
    std::map<std::string, CellRef> out;
    for (auto &[name, cell] : build_literal(s, answer).labels)
        out[name] = cell;
    return out;
}

CellRef lasso(CellStore &s, const std::vector<int> &heads, std::size_t back)
{
    std::vector<CellRef> pairs;
    for (int h : heads) {
        auto p = s.new_open_pair();
        s.set_child(p, 0, s.new_int(h));
        pairs.push_back(p);
    }
    for (std::size_t i = 0; i + 1 < pairs.size(); ++i)
        s.set_child(pairs[i], 1, pairs[i + 1]);
    s.set_child(pairs.back(), 1, pairs[back]);
    return pairs.front();
}

void drop_answers(Check &c, const std::string &prog, const std::string &query,
                  const std::vector<std::pair<int, std::string>> &expected)
{
    auto r = run_program(prog, query);
    c.expect(r.answers.size() == expected.size(), query + " gave " + join(r.answers));
    for (std::size_t i = 0; i < std::min(r.answers.size(), expected.size()); ++i) {
        CellStore s;
        auto got = rebuild(s, r.answers[i]);
        auto want = build_literal(s, expected[i].second).root;
        c.expect(s.int_value(s.deref(got.at("H"))) == expected[i].first, "H in " + r.answers[i]);
        c.expect(oracle_equal(s, got.at("T"), want), "T in " + r.answers[i]);
    }
}

} // namespace

int main()
{
    criterion(1, "coinductive bin", 1, [](Check &c) {
        auto prog = program_text("bin.pl");
        auto r = run_program(prog, "bin(L)");
        c.expect(r.answers == Answers{"L = [0|L]", "L = [1|L]"}, join(r.answers));
        auto g = run_program(prog, "X=[0,1,0,1,0,0,0|X], bin(X)");
        c.expect(g.answers.size() == 1, "ground query gave " + join(g.answers));
    });

    criterion(2, "comember and drop", 1, [](Check &c) {
        auto prog = program_text("comember.pl");
        auto r = run_program(prog, "_L=[1,2|_B], _B=[3,4,5|_B], comember(E, _L)");
        c.expect(r.answers == Answers{"E = 3", "E = 4", "E = 5"} && r.status == SolveStatus::exhausted,
                 join(r.answers));
        drop_answers(c, prog, "A=[1,2,3|A], drop(H, A, T)",
                     {{1, "T=[2,3,1|T]"}, {2, "T=[3,1,2|T]"}, {3, "T=[1,2,3|T]"}});
        drop_answers(c, prog, "B=[1|A], A=[2,3|A], drop(H, B, T)",
                     {{1, "T=[2,3|T]"}, {2, "T=[3,2|T]"}, {3, "T=[2,3|T]"}});
    });

    criterion(3, "p/q/r mutual coinduction", 1, [](Check &c) {
        auto prog = program_text("pqr.pl");
        auto r = run_program(prog, "p(X)");
        c.expect(r.answers == Answers{"X = [a,b|X]", "X = [c,d|X]"}, join(r.answers));
        c.expect(run_program(prog, "L=[a,b,c,d|L], p(L)").answers.size() == 1, "accepting query");
        c.expect(run_program(prog, "L=[a,c|L], p(L)").answers.empty(), "rejecting query");
    });

    criterion(4, "automaton", 1, [](Check &c) {
        auto prog = program_text("automaton.pl");
        auto r = run_program(prog, "automaton(s0, X)");
        c.expect(r.answers == Answers{"X = [a,b,c,d|X]", "X = [a,b,e|X]"}, join(r.answers));
        c.expect(run_program(prog, "L=[a,b,e,c,d|L], automaton(s0, L)").answers.empty(),
                 "rejecting query");
    });

    criterion(5, "sieve", 5, [](Check &c) {
        auto r = run_program(program_text("sieve.pl"), "primes(20, P)");
        c.expect(r.answers.size() == 1, join(r.answers));
        if (r.answers.size() == 1) {
            CellStore s;
            auto got = rebuild(s, r.answers[0]).at("P");
            auto want = build_literal(s, "Q=[2,3,5,7,11,13,17,19|Q]").root;
            c.expect(oracle_equal(s, got, want), r.answers[0]);
        }
    });

    criterion(6, "tabled member on a rational list", 1, [](Check &c) {
        auto r = run_program(program_text("member_tabled.pl"), "L=[1,2|L], member(E, L)");
        c.expect(r.answers == Answers{"L = [1,2|L], E = 1", "L = [1,2|L], E = 2"} &&
                     r.status == SolveStatus::exhausted,
                 join(r.answers));
    });

    criterion(7, "canonical form", 5, [](Check &c) {
        CellStore s;
        Trail t;
        auto a = canonical_term(s, t, build_literal(s, "A=[1|A]").root);
        auto b = canonical_term(s, t, build_literal(s, "B=[1,1|B]").root);
        auto cc = canonical_term(s, t, build_literal(s, "C=[1|A], A=[1|A]").root);
        c.expect(struct_equal(s, a, b) && struct_equal(s, b, cc), "A/B/C lists differ");
        auto l = canonical_term(s, t, build_literal(s, "L=[1,2,1,2|L]").root);
        c.expect(print_answer(s, {{"L", l}}).text() == "L = [1,2|L]", "[1,2,1,2|L]");
        auto f = canonical_term(s, t, build_literal(s, "F=f(a,f(a,F,b),b)").root);
        c.expect(print_answer(s, {{"F", f}}).text() == "F = f(a,F,b)", "f(a,f(a,F,b),b)");

        std::vector<CellRef> originals;
        for (std::size_t k = 1; k <= 6; ++k)
            for (unsigned bits = 0; bits < (1u << k); ++bits)
                for (std::size_t back = 0; back < k; ++back) {
                    std::vector<int> heads;
                    for (std::size_t i = 0; i < k; ++i)
                        heads.push_back((bits >> i) & 1 ? 2 : 1);
                    originals.push_back(lasso(s, heads, back));
                }
        std::vector<CellRef> canon;
        for (auto o : originals)
            canon.push_back(canonical_term(s, t, o));
        TableSpace ts;
        auto root = ts.new_root();
        std::vector<NodeId> leaves;
        for (auto x : canon) {
            VarNumbering v;
            leaves.push_back(ts.check_insert_term(s, root, x, v).leaf);
        }
        std::size_t pairs = 0, distinct_paths = 0;
        for (std::size_t i = 0; i < originals.size(); ++i) {
            c.expect(oracle_equal(s, canon[i], originals[i]), "canonical form changed the term");
            for (std::size_t j = i + 1; j < originals.size(); ++j) {
                if (!oracle_equal(s, originals[i], originals[j]))
                    continue;
                ++pairs;
                c.expect(struct_equal(s, canon[i], canon[j]), "bisimilar pair not struct_equal");
                distinct_paths += leaves[i] != leaves[j];
            }
        }
        std::printf("  info 7: %zu bisimilar pairs, %zu with distinct canonical token paths\n", pairs,
                    distinct_paths);
    });

    criterion(8, "trie round trip", 30, [](Check &c) {
        testsupport::TermGen gen(2024);
        CellStore s;
        Trail t;
        TableSpace ts;
        auto root = ts.new_root();
        for (int i = 0; i < 1000; ++i) {
            auto term = gen.make(s, 8);
            VarNumbering v;
            auto leaf = ts.check_insert_term(s, root, term, v).leaf;
            auto back = ts.reconstruct(leaf, s, t);
            c.expect(back.size() == 1 && variant(s, term, back[0]), "round trip " + std::to_string(i));
            VarNumbering v2;
            c.expect(ts.check_insert_term(s, root, back[0], v2).leaf == leaf, "reinsert " + std::to_string(i));
            auto toks = ts.path_tokens(leaf);
            std::vector<NodeId> path;
            for (auto n = leaf; ts.node(n).parent != no_node; n = ts.node(n).parent)
                path.insert(path.begin(), n);
            for (std::size_t k = 0; k < toks.size(); ++k) {
                if (toks[k].kind != TokenKind::RatRef)
                    continue;
                auto target = static_cast<NodeId>(toks[k].value);
                bool ancestor = std::find(path.begin(), path.begin() + static_cast<long>(k), target) !=
                                path.begin() + static_cast<long>(k);
                auto kind = ts.node(target).token.kind;
                c.expect(ancestor && (kind == TokenKind::Pair || kind == TokenKind::Functor),
                         "RatRef target is not a structure ancestor");
            }
        }
        c.expect(ts.rational_refs_valid(root), "rational_refs_valid");
    });

    criterion(9, "oracle equivalence", 30, [](Check &c) {
        testsupport::TermGen gen(12345);
        for (int i = 0; i < 2000; ++i) {
            CellStore s;
            Trail t;
            auto a = gen.make(s, 8);
            auto b = gen.make(s, 8);
            c.expect(struct_equal(s, a, b) == oracle_equal(s, a, b), "struct_equal disagrees");
            c.expect(bisimilar(s, a, b) == oracle_equal(s, a, b), "bisimilar disagrees");
            bool expect = testsupport::oracle_unifiable(s, a, b);
            c.expect(unify(s, t, a, b) == expect, "unify disagrees");
        }
        std::mt19937 rng(5);
        for (int round = 0; round < 40; ++round) {
            bool r[5][5] = {};
            std::string facts;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
                        r[i][j] = true;
                        facts += "edge(" + std::to_string(i) + "," + std::to_string(j) + ").\n";
                    }
            facts += "edge(9,9) :- fail.\n";
            for (int k = 0; k < 5; ++k)
                for (int i = 0; i < 5; ++i)
                    for (int j = 0; j < 5; ++j)
                        r[i][j] = r[i][j] || (r[i][k] && r[k][j]);
            std::set<std::string> expected;
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    if (r[i][j])
                        expected.insert("X = " + std::to_string(i) + ", Y = " + std::to_string(j));
            auto res = run_program(":- table(reach/2).\nreach(X,Y) :- reach(X,Z), edge(Z,Y).\n"
                                   "reach(X,Y) :- edge(X,Y).\n" + facts,
                                   "reach(X, Y)");
            std::set<std::string> got(res.answers.begin(), res.answers.end());
            c.expect(got == expected && got.size() == res.answers.size(),
                     "reachability round " + std::to_string(round));
        }
    });

    criterion(10, "benchmark shape", 600, [](Check &c) {
        auto slg = run_bench(BenchMode::coslg, 8, 10);
        std::printf("  info 10: %s\n", slg.to_text().c_str());
        c.expect(!slg.timeout && slg.seconds < 10, "co-SLG N=8 over 10 s");
        auto sld = run_bench(BenchMode::cosld, 8, 300);
        std::printf("  info 10: %s\n", sld.to_text().c_str());
        c.expect(!sld.timeout && sld.seconds < 300, "co-SLD N=8 over 300 s");
        c.expect(sld.seconds > slg.seconds, "co-SLD not slower than co-SLG");
        for (int n = 1; n <= 4; ++n) {
            auto answers = run_program(bench_program(BenchMode::coslg, n), "path(1, P)").answers;
            c.expect(!answers.empty(), "no co-SLG answers for N=" + std::to_string(n));
            Engine cosld;
            cosld.consult(bench_program(BenchMode::cosld, n));
            for (auto &a : answers)
                c.expect(testsupport::run_query(cosld, a + ", path(1, P)", 1).answers.size() == 1,
                         "co-SLD rejects " + a);
        }
    });

    criterion(11, "untabled member is truncated", 5, [](Check &c) {
        EngineOptions opts;
        opts.max_steps = 100000;
        auto r = run_program(program_text("member_plain.pl"), "L=[1,2|L], member(3, L)", opts);
        c.expect(r.answers.empty() && r.status == SolveStatus::truncated, "status was not truncated");
    });

    return failures == 0 ? 0 : 1;
}
