#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cycletab/errors.hpp"
#include "cycletab/printer.hpp"
#include "cycletab/rational_ops.hpp"
#include "cycletab/reader.hpp"
#include "support.hpp"

using namespace cycletab;

TEST_CASE("bin program parses into two directives and two clauses")
{
    auto p = parse_program(testsupport::program_text("bin.pl"));
    int directives = 0;
    int clauses = 0;
    for (auto &c : p.clauses)
        (c.term.is_compound(":-", 1) ? directives : clauses)++;
    CHECK(directives == 2);
    CHECK(clauses == 2);
}

TEST_CASE("sieve program parses")
{
    auto p = parse_program(testsupport::program_text("sieve.pl"));
    CHECK(p.clauses.size() == 10);
    auto &filter = p.clauses.back().term;
    REQUIRE(filter.is_compound(":-", 2));
    auto body = flatten_conjunction(filter.args[1]);
    REQUIRE(body.size() == 2);
    CHECK(body[0].is_compound(";", 2));
    CHECK(body[0].args[0].is_compound("->", 2));
}

TEST_CASE("operator precedence")
{
    auto t = parse_term("X is 1 + 2 * 3 - 4");
    REQUIRE(t.is_compound("is", 2));
    auto &rhs = t.args[1];
    REQUIRE(rhs.is_compound("-", 2));
    CHECK(rhs.args[0].is_compound("+", 2));
    CHECK(rhs.args[0].args[1].is_compound("*", 2));

    auto c = parse_term("a :- b, c ; d -> e");
    REQUIRE(c.is_compound(":-", 2));
    CHECK(c.args[1].is_compound(";", 2));

    auto m = parse_term("K mod H =:= 0");
    CHECK(m.is_compound("=:=", 2));
    CHECK(m.args[0].is_compound("mod", 2));

    auto n = parse_term("\\+ a = b");
    CHECK(n.is_compound("\\+", 1));

    auto neg = parse_term("f(-3, - 3, 1-2)");
    CHECK(neg.args[0].kind == SourceTerm::Kind::Int);
    CHECK(neg.args[0].value == -3);
    CHECK(neg.args[1].is_compound("-", 1));
    CHECK(neg.args[2].is_compound("-", 2));
}

TEST_CASE("lists, quoted atoms and comments")
{
    auto t = parse_term("[a,'B c'|T] % trailing comment");
    REQUIRE(t.is_compound(".", 2));
    CHECK(t.args[0].is_atom("a"));
    CHECK(t.args[1].args[0].is_atom("B c"));
    CHECK(t.args[1].args[1].kind == SourceTerm::Kind::Var);
    auto e = parse_term("[]");
    CHECK(e.is_atom("[]"));
}

TEST_CASE("syntax errors carry positions")
{
    try {
        parse_program("p(X :- q.\n");
        FAIL("expected a syntax error");
    } catch (const SyntaxError &e) {
        CHECK(e.line() == 1);
        CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parse_program("p(a).\nq(b"), SyntaxError);
    CHECK_THROWS_AS(parse_query(""), SyntaxError);
    CHECK_THROWS_AS(parse_term("a @@@ b"), SyntaxError);
}

TEST_CASE("queries")
{
    auto q = parse_query("X=[0,1|X], bin(X).");
    CHECK(q.goals.size() == 2);
    CHECK(q.variables == std::vector<std::string>{"X"});
    auto q2 = parse_query("?- bin(X).");
    CHECK(q2.goals.size() == 1);
    auto q3 = parse_query("_L=[1|_L], member(E, _L), f(_)");
    CHECK(q3.variables == std::vector<std::string>{"_L", "E"});
}

TEST_CASE("label literals")
{
    CellStore s;
    auto b = build_literal(s, "A=[2,3|A], B=[1|A]");
    REQUIRE(b.labels.size() == 2);
    CHECK(b.labels[0].first == "A");
    CHECK_THROWS_AS(build_literal(s, "A=[1|A], A=[2|A]"), PrologError);
    CHECK_THROWS_AS(build_literal(s, "A=B, B=[1|A]"), PrologError);
}

TEST_CASE("printing rational bindings")
{
    CellStore s;
    auto l = build_literal(s, "L=[0|L]").root;
    CHECK(print_answer(s, {{"L", l}}).text() == "L = [0|L]");

    auto c = build_literal(s, "C=[1|D], D=[1|D]").root;
    CHECK(print_answer(s, {{"C", c}}).text() == "C = [1|_S1], _S1 = [1|_S1]");

    auto f = build_literal(s, "f(a)").root;
    CHECK(print_answer(s, {{"X", f}}).text() == "X = f(a)");

    auto v = s.new_var();
    std::vector<CellRef> args{v, v};
    auto g = s.new_compound(s.intern("g"), args);
    CHECK(print_answer(s, {{"Y", g}}).text() == "Y = g(_1,_1)");

    CHECK(print_answer(s, {{"_Hidden", f}}).text() == "true");
    CHECK(print_answer(s, {}).text() == "true");
}

TEST_CASE("shared cycles print through a named variable")
{
    CellStore s;
    auto built = build_literal(s, "B=[1|A], A=[2,3|A]");
    std::vector<NamedBinding> bs{{"B", built.labels[0].second}, {"A", built.labels[1].second}};
    CHECK(print_answer(s, bs).text() == "B = [1|A], A = [2,3|A]");
}

TEST_CASE("atoms are quoted when needed")
{
    CHECK(quote_atom_if_needed("abc") == "abc");
    CHECK(quote_atom_if_needed("[]") == "[]");
    CHECK(quote_atom_if_needed("Abc") == "'Abc'");
    CHECK(quote_atom_if_needed("a b") == "'a b'");
}

TEST_CASE("json answers use path references for cycles")
{
    CellStore s;
    auto l = build_literal(s, "L=[0|L]").root;
    auto j = answer_json(s, {{"L", l}});
    auto &b = j["bindings"][0];
    CHECK(b["var"] == "L");
    CHECK(b["term"]["args"][1]["ref"] == nlohmann::json::array());
    CHECK(b["cycles"][0]["at"] == nlohmann::json::array({1}));
}

TEST_CASE("printed answers parse back to bisimilar terms")
{
    testsupport::TermGen gen(99);
    for (int i = 0; i < 300; ++i) {
        CellStore s;
        Trail t;
        auto term = gen.make(s, 8, false);
        auto text = print_answer(s, {{"X", term}}).text();
        auto q = parse_query(text);
        VarBindings vars;
        bool ok = true;
        for (auto &g : q.goals) {
            REQUIRE(g.is_compound("=", 2));
            auto lhs = build_term(s, g.args[0], vars);
            auto rhs = build_term(s, g.args[1], vars);
            ok = ok && unify(s, t, lhs, rhs);
        }
        CHECK_MESSAGE(ok, text);
        CHECK_MESSAGE(testsupport::oracle_equal(s, vars.at("X"), term), text);
    }
}
