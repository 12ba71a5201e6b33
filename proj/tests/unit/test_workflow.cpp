#include "fixtures.hpp"
#include "generators.hpp"

#include <doctest.h>

#include <algorithm>

using namespace flowcheck;

namespace {

ParseErrorKind parse_failure(const std::string& xml) {
    try {
        parse_yawl(xml);
    } catch (const ParseError& e) {
        return e.kind();
    }
    FAIL("document was accepted");
    return ParseErrorKind::MalformedXml;
}

std::string net_doc(const std::string& elements, const std::string& extra = {}) {
    return "<specificationSet><specification uri=\"x\"><decomposition id=\"x\" isRootNet=\"true\">"
           "<processControlElements>" +
           elements + "</processControlElements></decomposition>" + extra + "</specification></specificationSet>";
}

const std::string kIn = "<inputCondition id=\"i\"><flowsInto><nextElementRef id=\"t\"/></flowsInto></inputCondition>";
const std::string kOut = "<outputCondition id=\"o\"/>";

std::string task(const std::string& body) {
    return "<task id=\"t\"><flowsInto><nextElementRef id=\"o\"/></flowsInto>" + body + "</task>";
}

std::vector<std::string> diagnostic_kinds(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds)
        out.push_back(d.kind);
    return out;
}

/// Implicit conditions come back from XML as plain ones, written between
/// the input and the output condition.
WorkflowSpec as_plain(WorkflowSpec spec) {
    auto relabel = [](Net& net) {
        for (auto& c : net.conditions)
            if (c.kind == ConditionKind::Implicit)
                c.kind = ConditionKind::Plain;
        std::stable_partition(net.conditions.begin(), net.conditions.end(),
                              [](const Condition& c) { return c.kind == ConditionKind::Input; });
        std::stable_partition(net.conditions.begin(), net.conditions.end(),
                              [](const Condition& c) { return c.kind != ConditionKind::Output; });
    };
    relabel(spec.root);
    for (auto& [ref, net] : spec.subnets)
        relabel(net);
    return spec;
}

} // namespace

TEST_CASE("trip model parses into one net with five tasks") {
    const WorkflowSpec spec = parse_yawl(fixture_text("trip.yawl"));
    CHECK(spec.subnets.empty());
    REQUIRE(spec.root.tasks.size() == 5);
    const Task* reg = spec.root.find_task("register");
    const Task* pay = spec.root.find_task("pay");
    REQUIRE(reg);
    REQUIRE(pay);
    CHECK(reg->split == Gate::Or);
    CHECK(pay->join == Gate::Or);
    CHECK(spec.root.successors("register") == std::vector<NodeId>{"car", "flight", "hotel"});
}

TEST_CASE("parse errors carry their kind") {
    CHECK(parse_failure("<specificationSet><specification") == ParseErrorKind::MalformedXml);
    CHECK(parse_failure(fixture_text("missing_output.yawl")) == ParseErrorKind::MissingOutputCondition);
    CHECK(parse_failure(net_doc(task("") + kOut)) == ParseErrorKind::MissingInputCondition);
    CHECK(parse_failure(net_doc(kIn + "<task id=\"t\"><flowsInto><nextElementRef id=\"nowhere\"/></flowsInto></task>" +
                                kOut)) == ParseErrorKind::DanglingReference);
    CHECK(parse_failure(net_doc(kIn + task("<removesTokens id=\"ghost\"/>") + kOut)) ==
          ParseErrorKind::DanglingReference);
    CHECK(parse_failure(net_doc(kIn + task("<decomposesTo id=\"ghost\"/>") + kOut)) ==
          ParseErrorKind::DanglingReference);
    CHECK(parse_failure(net_doc(kIn + task("<minimum>1</minimum><maximum>2</maximum><creationMode code=\"dynamic\"/>") +
                                kOut)) == ParseErrorKind::UnsupportedFeature);
    CHECK(parse_failure(net_doc(kIn + "<task id=\"a.b\"/>" + task("") + kOut)) == ParseErrorKind::InvalidId);
    CHECK(parse_failure(net_doc(kIn + task("") + "<condition id=\"t\"/>" + kOut)) == ParseErrorKind::DuplicateId);
}

TEST_CASE("multiple-instance composite tasks are rejected") {
    const std::string sub = "<decomposition id=\"s\"><processControlElements><inputCondition id=\"a\">"
                            "<flowsInto><nextElementRef id=\"b\"/></flowsInto></inputCondition>"
                            "<outputCondition id=\"b\"/></processControlElements></decomposition>";
    CHECK(parse_failure(net_doc(kIn + task("<minimum>1</minimum><maximum>2</maximum><decomposesTo id=\"s\"/>") + kOut,
                                sub)) == ParseErrorKind::UnsupportedFeature);
}

TEST_CASE("decomposition without a net makes an atomic task") {
    const WorkflowSpec spec =
        parse_yawl(net_doc(kIn + task("<decomposesTo id=\"svc\"/>") + kOut, "<decomposition id=\"svc\"/>"));
    CHECK_FALSE(spec.root.find_task("t")->subnet.has_value());
}

TEST_CASE("multiple-instance parameters are read") {
    const WorkflowSpec spec = parse_yawl(fixture_text("mi.yawl"));
    const Task* review = spec.root.find_task("review");
    REQUIRE(review);
    REQUIRE(review->mi.has_value());
    CHECK(*review->mi == MiParams{1, 3, 2});
}

TEST_CASE("composite fixture has one subnet") {
    const WorkflowSpec spec = parse_yawl(fixture_text("composite.yawl"));
    CHECK(spec.root.id == "main");
    REQUIRE(spec.subnets.size() == 1);
    CHECK(spec.root.find_task("sub")->subnet == std::optional<std::string>("inner"));
}

TEST_CASE("emit then parse gives the same spec") {
    for (const char* name : {"trip.yawl", "single.yawl", "cancel_deadlock.yawl", "composite.yawl", "mi.yawl",
                             "two_token.yawl", "recursive.yawl"}) {
        CAPTURE(name);
        const WorkflowSpec spec = parse_yawl(fixture_text(name));
        CHECK(parse_yawl(emit_yawl(spec)) == spec);
        const WorkflowSpec normal = normalize(spec);
        CHECK(parse_yawl(emit_yawl(normal)) == as_plain(normal));
    }
    testsupport::Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        const WorkflowSpec spec = testsupport::random_workflow(rng);
        CHECK(parse_yawl(emit_yawl(spec)) == as_plain(spec));
    }
}

TEST_CASE("normalize inserts one implicit condition per task-to-task arc") {
    const WorkflowSpec raw = parse_yawl(fixture_text("trip.yawl"));
    const auto task_arcs = std::count_if(raw.root.flows.begin(), raw.root.flows.end(), [&](const Arc& a) {
        return raw.root.find_task(a.from) && raw.root.find_task(a.to);
    });
    CHECK(task_arcs == 6);
    const WorkflowSpec spec = normalize(raw);
    CHECK(spec.root.conditions.size() == raw.root.conditions.size() + 6);
    CHECK(spec.root.find_condition("c_register_flight"));
    CHECK(spec.root.find_condition("c_register_flight")->kind == ConditionKind::Implicit);
    for (const auto& arc : spec.root.flows)
        CHECK_FALSE((spec.root.find_task(arc.from) && spec.root.find_task(arc.to)));
    CHECK(normalize(spec) == spec);
    CHECK(validate(raw) != std::vector<Diagnostic>{});
}

TEST_CASE("normalize avoids clashing condition names") {
    WorkflowSpec spec = parse_yawl(fixture_text("single.yawl"));
    spec.root.tasks.push_back(Task{"u"});
    spec.root.tasks.push_back(Task{"v"});
    spec.root.conditions.push_back(Condition{"c_t_u"});
    spec.root.flows = {{"i", "t"}, {"t", "u"}, {"u", "c_t_u"}, {"c_t_u", "v"}, {"v", "o"}};
    const WorkflowSpec out = normalize(spec);
    CHECK(out.root.find_condition("c_t_u_2"));
    CHECK(validate(out).empty());
}

TEST_CASE("validate accepts the well-formed fixtures") {
    for (const char* name : {"trip.yawl", "single.yawl", "cancel_deadlock.yawl", "composite.yawl", "mi.yawl",
                             "two_token.yawl"}) {
        CAPTURE(name);
        CHECK(validate(fixture_model(name)).empty());
    }
}

TEST_CASE("isolated task gets one diagnostic per problem") {
    const auto ds = validate(fixture_model("isolated.yawl"));
    CHECK(diagnostic_kinds(ds) == std::vector<std::string>{"Unreachable", "NoInput", "NoOutput"});
    for (const auto& d : ds)
        CHECK(d.node == "lonely");
}

TEST_CASE("recursive composition is reported") {
    const auto kinds = diagnostic_kinds(validate(fixture_model("recursive.yawl")));
    CHECK(std::count(kinds.begin(), kinds.end(), "RecursiveComposition") == 1);
}

TEST_CASE("validate reports structural problems") {
    WorkflowSpec spec = fixture_model("single.yawl");
    spec.root.tasks[0].cancel_set = {"ghost"};
    spec.root.tasks[0].mi = MiParams{2, 1, 1};
    spec.root.flows.push_back(Arc{"o", "t"});
    const auto kinds = diagnostic_kinds(validate(spec));
    for (const char* k : {"OutputHasOutgoing", "DanglingCancel", "InvalidMiParams"})
        CHECK(std::count(kinds.begin(), kinds.end(), k) == 1);
}

TEST_CASE("event alphabet sizes") {
    const auto trip = event_alphabet(fixture_model("trip.yawl"));
    CHECK(trip.size() == 12);
    CHECK(trip.contains("pay.start"));
    CHECK(trip.contains("_terminate"));
    CHECK(trip.contains("_deadlock"));
    // 2 tasks, one of them multiple-instance
    CHECK(event_alphabet(fixture_model("mi.yawl")).size() == 2 * 2 + 2 + 2);
    const auto composite = event_alphabet(fixture_model("composite.yawl"));
    CHECK(composite.size() == 2 * 6 + 2);
    CHECK(composite.contains("sub.s4.end"));
    CHECK(composite.contains("sub.start"));
}
