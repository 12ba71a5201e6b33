#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include "flowcheck/fltl.hpp"

#include <doctest.h>

#include <algorithm>

using namespace flowcheck;
using testsupport::EventLasso;

namespace {

const FluentDef kSomeBook{"SomeBook", {"flight.start", "hotel.start", "car.start"}, {"pay.end"}, false};

std::vector<std::string> kinds(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds)
        out.push_back(d.kind);
    return out;
}

EventLasso random_lasso(testsupport::Rng& rng, const std::vector<std::string>& events, int max_len) {
    std::uniform_int_distribution<int> len(0, max_len), pick(0, static_cast<int>(events.size()) - 1);
    EventLasso l;
    for (int i = len(rng); i > 0; --i)
        l.prefix.push_back(events[pick(rng)]);
    for (int i = std::max(1, len(rng)); i > 0; --i)
        l.cycle.push_back(events[pick(rng)]);
    return l;
}

} // namespace

TEST_CASE("property file with the booking fluent") {
    const PropertySet props = parse_props(
        "fluent SomeBook = <{flight.start,hotel.start,car.start},{pay.end}> initially false\n"
        "assert Resp = [](SomeBook -> <>pay.start)\n");
    REQUIRE(props.fluents.size() == 1);
    CHECK(props.fluents[0] == kSomeBook);
    REQUIRE(props.assertions.size() == 1);
    CHECK(props.assertions[0].name == "Resp");
    CHECK(to_string(props.assertions[0].formula) == "[](SomeBook -> <>pay.start)");
    CHECK(parse_props(fixture_text("trip.flp")) == props);
}

TEST_CASE("property file details") {
    const PropertySet props = parse_props("// header\n"
                                          "fluent On = <{a.start}, {}> initially true // trailing\n"
                                          "assert T = []<>x.start\n"
                                          "assert Chain = a -> b -> c\n");
    CHECK(props.fluents[0].initially);
    CHECK(props.fluents[0].terminating.empty());
    CHECK(props.assertions[0].formula == fml::always(fml::eventually(fml::event("x.start"))));
    CHECK(props.assertions[1].formula ==
          fml::implies(fml::fluent("a"), fml::implies(fml::fluent("b"), fml::fluent("c"))));
    CHECK(parse_props("").fluents.empty());
    CHECK(parse_props("  // only a comment\n").assertions.empty());
}

TEST_CASE("property file errors") {
    CHECK_THROWS_AS(parse_props("fluent A = <{a.start},{b.end}>\nassert A = a.start"), DuplicateName);
    CHECK_THROWS_AS(parse_props("assert P = a.start\nassert P = b.start"), DuplicateName);
    CHECK_THROWS_AS(parse_props("fluent A = <{a.start},{b.end}"), SyntaxError);
    CHECK_THROWS_AS(parse_props("fluent A = <{a.start},{b.end}> initially maybe"), SyntaxError);
    CHECK_THROWS_AS(parse_props("fluent a.b = <{a.start},{}>"), SyntaxError);
    CHECK_THROWS_AS(parse_props("assert U = a.start"), SyntaxError);
    try {
        parse_props("fluent A = <{a.start},{}>\nassert B = (a.start");
        FAIL("accepted");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("fluent validation") {
    const auto alphabet = event_alphabet(fixture_model("trip.yawl"));
    CHECK(validate_fluents(std::vector{kSomeBook}, alphabet).empty());
    CHECK(kinds(validate_fluents(std::vector{FluentDef{"X1", {"pay.start"}, {"pay.start"}}}, alphabet)) ==
          std::vector<std::string>{"OverlappingSets"});
    CHECK(kinds(validate_fluents(std::vector{FluentDef{"G", {"ghost.start"}, {}}}, alphabet)) ==
          std::vector<std::string>{"UnknownEvent"});
    CHECK(kinds(validate_fluents(std::vector{FluentDef{"E", {}, {"pay.end"}}}, alphabet)) ==
          std::vector<std::string>{"EmptyInitiating"});
    CHECK(kinds(validate_fluents(std::vector{kSomeBook, kSomeBook}, alphabet)) ==
          std::vector<std::string>{"DuplicateName"});
}

TEST_CASE("formula validation") {
    const auto alphabet = event_alphabet(fixture_model("trip.yawl"));
    const std::vector<FluentDef> fluents{kSomeBook};
    CHECK(validate_formula(parse_formula("[](SomeBook -> <>pay.start)"), fluents, alphabet).empty());
    CHECK(kinds(validate_formula(parse_formula("<>Other"), fluents, alphabet)) ==
          std::vector<std::string>{"UnknownFluent"});
    CHECK(kinds(validate_formula(parse_formula("<>ghost.end"), fluents, alphabet)) ==
          std::vector<std::string>{"UnknownEvent"});
    CHECK(kinds(validate_formula(parse_formula("<>$A"), fluents, alphabet)) ==
          std::vector<std::string>{"UnboundPlaceholder"});
}

TEST_CASE("Executing fluents end on completion or cancellation") {
    const auto fluents = executing_fluents(fixture_model("cancel_deadlock.yawl"));
    auto b = std::find_if(fluents.begin(), fluents.end(), [](const FluentDef& f) { return f.name == "Executing(b)"; });
    REQUIRE(b != fluents.end());
    CHECK(b->initiating == std::vector<EventLabel>{"b.start"});
    CHECK(std::set<EventLabel>(b->terminating.begin(), b->terminating.end()) ==
          std::set<EventLabel>{"b.end", "x.end"});
    const auto composite = executing_fluents(fixture_model("composite.yawl"));
    CHECK(std::any_of(composite.begin(), composite.end(),
                      [](const FluentDef& f) { return f.name == "Executing(sub.s2)"; }));
}

TEST_CASE("fluent tracker applies effects after the event") {
    const FluentTracker tracker({kSomeBook});
    auto v = tracker.initial();
    CHECK_FALSE(tracker.holds(v, "SomeBook"));
    v = tracker.step(v, "flight.start");
    CHECK(tracker.holds(v, "SomeBook"));
    CHECK(tracker.step(v, "register.end") == v);
    v = tracker.step(v, "pay.end");
    CHECK_FALSE(tracker.holds(v, "SomeBook"));
}

TEST_CASE("fluent values along a booking run") {
    const std::vector<FluentDef> fluents{kSomeBook};
    const std::vector<EventLabel> prefix{"register.start", "register.end", "flight.start"};
    const std::vector<EventLabel> cycle{"_terminate"};
    // position i holds iff X^i SomeBook holds at 0
    auto at = [&](int i) {
        Formula f = fml::fluent("SomeBook");
        for (int k = 0; k < i; ++k)
            f = fml::next(f);
        return eval_on_lasso(f, fluents, prefix, cycle);
    };
    CHECK_FALSE(at(0));
    CHECK_FALSE(at(1));
    CHECK(at(2));
    CHECK(eval_on_lasso(parse_formula("[](SomeBook -> <>pay.start)"), fluents,
                        std::vector<EventLabel>{"register.start", "register.end", "flight.start", "flight.end",
                                                "pay.start", "pay.end"},
                        cycle));
    CHECK_FALSE(eval_on_lasso(parse_formula("[](SomeBook -> <>pay.start)"), fluents, prefix, cycle));
}

TEST_CASE("reference semantics agree with the test oracle") {
    testsupport::Rng rng(5);
    const std::vector<std::string> events{"a.start", "a.end", "b.start", "b.end"};
    const std::set<EventLabel> alphabet(events.begin(), events.end());
    for (int i = 0; i < 300; ++i) {
        const auto fluents = testsupport::random_fluents(rng, alphabet, 2);
        const Formula f = testsupport::random_formula(rng, events, {"F0", "F1"}, 3);
        for (int k = 0; k < 10; ++k) {
            const EventLasso l = random_lasso(rng, events, 5);
            CAPTURE(to_string(f));
            CHECK(eval_on_lasso(f, fluents, l.prefix, l.cycle) == testsupport::oracle_holds(f, fluents, l));
        }
    }
}

TEST_CASE("unrolling repeats the cycle until the fluent values repeat") {
    const std::vector<FluentDef> fluents{{"T", {"a"}, {"b"}, false}};
    // a toggles T on, b off; cycle "a b" enters with T false each time
    const LetterLasso w = unroll_lasso(fluents, std::vector<EventLabel>{}, std::vector<EventLabel>{"a", "b"});
    CHECK(w.prefix.empty());
    CHECK(w.cycle.size() == 2);
    const LetterLasso w2 = unroll_lasso(fluents, std::vector<EventLabel>{}, std::vector<EventLabel>{"a"});
    CHECK(w2.cycle.size() == 1);
    CHECK(w2.cycle[0].fluents == std::set<std::string>{"T"});
}

TEST_CASE("negation normal form preserves meaning") {
    testsupport::Rng rng(17);
    const std::vector<std::string> events{"p.start", "q.start", "r.end"};
    for (int i = 0; i < 300; ++i) {
        const Formula f = testsupport::random_formula(rng, events, {}, 3);
        const Formula n = to_nnf(f);
        for (int k = 0; k < 5; ++k) {
            const EventLasso l = random_lasso(rng, events, 4);
            CAPTURE(to_string(f));
            CHECK(testsupport::oracle_holds(f, {}, l) == testsupport::oracle_holds(n, {}, l));
        }
    }
}

TEST_CASE("Buchi automata accept exactly the satisfying lassos") {
    testsupport::Rng rng(23);
    const std::vector<std::string> events{"p.start", "q.start", "r.end"};
    const std::vector<FluentDef> fluents{{"F", {"p.start"}, {"q.start"}, false}};
    for (int i = 0; i < 200; ++i) {
        const Formula f = testsupport::random_formula(rng, events, {"F"}, 3);
        const BuchiAutomaton ba = ltl_to_buchi(f);
        const BuchiAutomaton single = ba.degeneralize();
        for (int k = 0; k < 50; ++k) {
            const EventLasso l = random_lasso(rng, events, 6);
            const LetterLasso word = unroll_lasso(fluents, l.prefix, l.cycle);
            const bool expected = testsupport::oracle_holds(f, fluents, l);
            CAPTURE(to_string(f));
            CHECK(accepts(ba, word) == expected);
            CHECK(accepts(single, word) == expected);
        }
    }
}

TEST_CASE("Always and Until on small words") {
    const std::vector<FluentDef> none;
    const Formula always_p = parse_formula("[]p.start");
    const Formula p_until_q = parse_formula("p.start U q.start");
    auto word = [](std::vector<EventLabel> prefix, std::vector<EventLabel> cycle) {
        return unroll_lasso({}, prefix, cycle);
    };
    CHECK(accepts(ltl_to_buchi(always_p), word({}, {"p.start"})));
    CHECK_FALSE(accepts(ltl_to_buchi(always_p), word({"p.start", "q.start"}, {"p.start"})));
    CHECK_FALSE(accepts(ltl_to_buchi(always_p), word({"p.start"}, {"p.start", "r.end"})));
    CHECK(accepts(ltl_to_buchi(p_until_q), word({"q.start"}, {"r.end"})));
    CHECK_FALSE(accepts(ltl_to_buchi(p_until_q), word({}, {"p.start"})));
}

TEST_CASE("booking response holds on the trip model and paying is not avoidable") {
    const WorkflowSpec spec = fixture_model("trip.yawl");
    const Lts lts = build_lts(compile(spec));
    const std::vector<FluentDef> fluents{kSomeBook};
    const Formula resp = parse_formula("[](SomeBook -> <>pay.start)");
    const Verdict ok = check(lts, fluents, resp);
    CHECK(ok.holds);

    const auto lassos = testsupport::dag_lassos(lts, 100000);
    REQUIRE(lassos.has_value());
    CHECK_FALSE(testsupport::oracle_counterexample(resp, fluents, *lassos).has_value());

    const Formula bad = parse_formula("[] !pay.start");
    const Verdict v = check(lts, fluents, bad);
    REQUIRE_FALSE(v.holds);
    CHECK(std::find(v.prefix.begin(), v.prefix.end(), "pay.start") != v.prefix.end());
    CHECK(replays(lts, v.prefix, v.cycle));
    CHECK_FALSE(testsupport::oracle_holds(bad, fluents, EventLasso{v.prefix, v.cycle}));
    CHECK(v.states.size() == v.prefix.size() + v.cycle.size() + 1);
    CHECK(v.states.back() == v.states[v.prefix.size()]);
}

TEST_CASE("false is violated and termination fails under a reachable deadlock") {
    const Lts single = build_lts(compile(fixture_model("single.yawl")));
    const Verdict f = check(single, {}, parse_formula("[] false"));
    REQUIRE_FALSE(f.holds);
    CHECK(replays(single, f.prefix, f.cycle));

    const Lts lts = build_lts(compile(fixture_model("cancel_deadlock.yawl")));
    const Verdict v = check(lts, {}, parse_formula("<> _terminate"));
    REQUIRE_FALSE(v.holds);
    CHECK(v.cycle == std::vector<EventLabel>{"_deadlock"});
    CHECK(check(build_lts(compile(fixture_model("trip.yawl"))), {}, parse_formula("<> _terminate")).holds);
}

TEST_CASE("Executing fluents can be checked") {
    const WorkflowSpec spec = fixture_model("cancel_deadlock.yawl");
    const Lts lts = build_lts(compile(spec));
    const Formula f = parse_formula("[](Executing(b) -> <>b.end)");
    const auto fluents = resolve_fluents(f, {}, spec);
    REQUIRE(fluents.size() == 1);
    const Verdict v = check(lts, fluents, f);
    // b can be cancelled by x while running
    REQUIRE_FALSE(v.holds);
    CHECK(std::find(v.prefix.begin(), v.prefix.end(), "x.end") != v.prefix.end());
    CHECK(check(lts, fluents, parse_formula("[](Executing(b) -> <>(b.end || x.end))")).holds);
}

TEST_CASE("a formula or its negation is violated") {
    testsupport::Rng rng(31);
    const WorkflowSpec spec = fixture_model("trip.yawl");
    const Lts lts = build_lts(compile(spec));
    const auto alphabet = event_alphabet(spec);
    const std::vector<EventLabel> events(alphabet.begin(), alphabet.end());
    for (int i = 0; i < 100; ++i) {
        const auto fluents = testsupport::random_fluents(rng, alphabet, 2);
        const Formula f = testsupport::random_formula(rng, events, {"F0", "F1"}, 3);
        CAPTURE(to_string(f));
        CHECK_FALSE((check(lts, fluents, f).holds && check(lts, fluents, fml::not_(f)).holds));
    }
}

TEST_CASE("product limit") {
    const Lts lts = build_lts(compile(fixture_model("trip.yawl")));
    CHECK_THROWS_AS(check(lts, {}, parse_formula("[]<>_terminate"), CheckOptions{5}), ProductLimitExceeded);
    CheckStats stats;
    check(lts, {}, parse_formula("[]<>_terminate"), {}, &stats);
    CHECK(stats.product_states >= lts.num_states());
}

TEST_CASE("replays rejects traces the LTS cannot perform") {
    const Lts lts = build_lts(compile(fixture_model("single.yawl")));
    CHECK(replays(lts, std::vector<EventLabel>{"t.start", "t.end"}, std::vector<EventLabel>{"_terminate"}));
    CHECK(replays(lts, std::vector<EventLabel>{"t.start", "t.end", "_terminate"}, std::vector<EventLabel>{"_terminate"}));
    CHECK_FALSE(replays(lts, std::vector<EventLabel>{"t.start"}, std::vector<EventLabel>{"t.end", "_terminate"}));
    CHECK_FALSE(replays(lts, std::vector<EventLabel>{"t.end"}, std::vector<EventLabel>{"_terminate"}));
    CHECK_FALSE(replays(lts, std::vector<EventLabel>{}, std::vector<EventLabel>{"t.start", "t.end"}));
    CHECK_FALSE(replays(lts, std::vector<EventLabel>{"t.start", "t.end"}, std::vector<EventLabel>{}));
}
