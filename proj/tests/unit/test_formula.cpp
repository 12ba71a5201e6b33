#include "generators.hpp"

#include "flowcheck/formula.hpp"

#include <doctest.h>

using namespace flowcheck;
using namespace flowcheck::fml;

TEST_CASE("operator precedence and associativity") {
    CHECK(parse_formula("a -> b -> c") == implies(fluent("a"), implies(fluent("b"), fluent("c"))));
    CHECK(parse_formula("a && b || c") == or_(and_(fluent("a"), fluent("b")), fluent("c")));
    CHECK(parse_formula("a || b && c") == or_(fluent("a"), and_(fluent("b"), fluent("c"))));
    CHECK(parse_formula("a U b || c") == until(fluent("a"), or_(fluent("b"), fluent("c"))));
    CHECK(parse_formula("a U b -> c") == implies(until(fluent("a"), fluent("b")), fluent("c")));
    CHECK(parse_formula("a U b W c") == until(fluent("a"), weak_until(fluent("b"), fluent("c"))));
    CHECK(parse_formula("a <-> b -> c") == iff(fluent("a"), implies(fluent("b"), fluent("c"))));
    CHECK(parse_formula("a <-> b <-> c") == iff(iff(fluent("a"), fluent("b")), fluent("c")));
    CHECK(parse_formula("!a U b") == until(not_(fluent("a")), fluent("b")));
    CHECK(parse_formula("[]<>x.start") == always(eventually(event("x.start"))));
    CHECK(parse_formula("X X a R b") == release(next(next(fluent("a"))), fluent("b")));
}

TEST_CASE("atoms: dotted names and reserved labels are events") {
    CHECK(parse_formula("pay.start") == event("pay.start"));
    CHECK(parse_formula("sub.s1.end") == event("sub.s1.end"));
    CHECK(parse_formula("_terminate") == event("_terminate"));
    CHECK(parse_formula("_deadlock") == event("_deadlock"));
    CHECK(parse_formula("SomeBook") == fluent("SomeBook"));
    CHECK(parse_formula("Executing(sub.s1)") == fluent("Executing(sub.s1)"));
    CHECK(parse_formula("$A") == placeholder("A"));
    CHECK(parse_formula("true && !false") == and_(truth(), not_(falsity())));
}

TEST_CASE("the booking property as typed in the tool") {
    const Formula f = parse_formula("[](someBook -> <>(pay.start))");
    CHECK(f == always(implies(fluent("someBook"), eventually(event("pay.start")))));
    CHECK(to_string(f) == "[](someBook -> <>pay.start)");
}

TEST_CASE("syntax errors report a position") {
    for (const char* text : {"[](a ->", "a &&& b", "(a", "a b", "U a", "X", "fluent", "a.", "$", "<>)"}) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse_formula(text), SyntaxError);
    }
    try {
        parse_formula("a &&\n  )");
        FAIL("accepted");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("printer uses minimal parentheses") {
    CHECK(to_string(parse_formula("((a && b)) || c")) == "a && b || c");
    CHECK(to_string(parse_formula("a && (b || c)")) == "a && (b || c)");
    CHECK(to_string(parse_formula("(a -> b) -> c")) == "(a -> b) -> c");
    CHECK(to_string(parse_formula("a -> (b -> c)")) == "a -> b -> c");
    CHECK(to_string(parse_formula("!(a U b)")) == "!(a U b)");
    CHECK(to_string(parse_formula("[] ! _deadlock")) == "[]!_deadlock");
    CHECK(to_string(parse_formula("X (a)")) == "X a");
    CHECK(to_string(parse_formula("!$B W $A")) == "!$B W $A");
}

TEST_CASE("print then parse is the identity on random formulas") {
    testsupport::Rng rng(3);
    const std::vector<EventLabel> events{"a.start", "a.end", "sub.b.end", "_terminate"};
    const std::vector<std::string> fluents{"F", "Busy", "Executing(a)"};
    for (int i = 0; i < 1000; ++i) {
        const Formula f = testsupport::random_formula(rng, events, fluents, 5);
        CAPTURE(to_string(f));
        CHECK(parse_formula(to_string(f)) == f);
    }
}

TEST_CASE("reference collectors") {
    const Formula f = parse_formula("[](F -> <>a.start) U ($P && Executing(t) && _deadlock)");
    CHECK(fluent_refs(f) == std::set<std::string>{"Executing(t)", "F"});
    CHECK(event_refs(f) == std::set<std::string>{"_deadlock", "a.start"});
    CHECK(placeholders(f) == std::set<std::string>{"P"});
    CHECK(depth(parse_formula("a")) == 0);
    CHECK(depth(f) == 4);
}
