// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "fsp_reader.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include "flowcheck/fsp.hpp"
#include "flowcheck/templates.hpp"

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace flowcheck;
using testsupport::EventLasso;
using Clock = std::chrono::steady_clock;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string fixture(const std::string& name) { return std::string(FLOWCHECK_FIXTURES) + "/" + name; }

WorkflowSpec load(const std::string& name) { return normalize(parse_yawl(read_text(fixture(name)))); }

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double peak_rss_mb() {
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << "[" << what << "] ";
        }
    }
};

// Every violation seen anywhere in this run is collected here and
// re-examined by the soundness criterion.
struct Witness {
    std::string where;
    const Lts* lts;
    std::vector<FluentDef> fluents;
    Formula formula;
    Verdict verdict;
};
std::vector<Witness> witnesses;
std::vector<std::unique_ptr<Lts>> kept;

const Lts& keep(Lts lts) {
    kept.push_back(std::make_unique<Lts>(std::move(lts)));
    return *kept.back();
}

Verdict checked(const std::string& where, const Lts& lts, const std::vector<FluentDef>& fluents,
                const Formula& formula) {
    Verdict v = check(lts, fluents, formula);
    if (!v.holds)
        witnesses.push_back(Witness{where, &lts, fluents, formula, v});
    return v;
}

void trip_end_to_end(Outcome& out) {
    const auto start = Clock::now();
    const WorkflowSpec spec = load("trip.yawl");
    out.require(validate(spec).empty(), "trip validates");
    PropertySet props = parse_props("fluent SomeBook = <{flight.start, hotel.start, car.start}, {pay.end}>\n"
                                    "assert Resp = [](SomeBook -> <>pay.start)\n"
                                    "assert Bad = [] !pay.start\n");
    out.require(validate_fluents(props.fluents, event_alphabet(spec)).empty(), "fluent validates");
    const Lts& lts = keep(build_lts(compile(spec)));
    const Verdict resp = checked("trip/Resp", lts, props.fluents, props.assertions[0].formula);
    const Verdict bad = checked("trip/Bad", lts, props.fluents, props.assertions[1].formula);
    const double elapsed = seconds_since(start);

    out.require(resp.holds, "Resp holds");
    out.require(!bad.holds, "Bad violated");
    out.require(replays(lts, bad.prefix, bad.cycle), "Bad counterexample replays");
    const auto pays = [&] {
        for (const auto* part : {&bad.prefix, &bad.cycle})
            for (const auto& e : *part)
                if (e == "pay.start")
                    return true;
        return false;
    }();
    out.require(pays, "counterexample contains pay.start");
    out.require(elapsed < 1.0, "runtime < 1 s");

    const auto lassos = testsupport::dag_lassos(lts, 1'000'000);
    out.require(lassos.has_value(), "lasso enumeration");
    if (lassos) {
        out.require(!testsupport::oracle_counterexample(props.assertions[0].formula, props.fluents, *lassos),
                    "oracle agrees on Resp");
        out.require(testsupport::oracle_counterexample(props.assertions[1].formula, props.fluents, *lassos)
                        .has_value(),
                    "oracle agrees on Bad");
        out.detail << lts.num_states() << " states, " << lassos->size() << " lassos, ";
    }
    out.detail << elapsed * 1000 << " ms";
}

void differential(Outcome& out) {
    const auto start = Clock::now();
    testsupport::Rng rng(20240611);
    int models = 0, formulas = 0, agree = 0, violations = 0, rejected = 0;
    while (models < 200) {
        const WorkflowSpec spec = testsupport::random_workflow(rng);
        if (!validate(spec).empty()) {
            ++rejected;
            continue;
        }
        std::optional<Lts> lts;
        try {
            lts = build_lts(compile(spec));
        } catch (const BoundExceeded&) {
            ++rejected;
            continue;
        }
        const auto lassos = testsupport::dag_lassos(*lts, 20'000);
        if (!lassos) {
            ++rejected;
            continue;
        }
        const Lts& kept_lts = keep(std::move(*lts));
        ++models;
        const auto alphabet = event_alphabet(spec);
        const std::vector<EventLabel> events(alphabet.begin(), alphabet.end());
        for (int k = 0; k < 5; ++k) {
            const auto fluents = testsupport::random_fluents(rng, alphabet, 2);
            const Formula f = testsupport::random_formula(rng, events, {"F0", "F1"}, 3);
            const Verdict v = checked("random/" + std::to_string(models), kept_lts, fluents, f);
            const bool oracle = !testsupport::oracle_counterexample(f, fluents, *lassos).has_value();
            ++formulas;
            if (v.holds == oracle)
                ++agree;
            else if (out.ok)
                out.detail << "disagreement on " << to_string(f) << "; ";
            violations += v.holds ? 0 : 1;
        }
    }
    const double elapsed = seconds_since(start);
    out.require(agree == formulas, "100% agreement");
    out.require(elapsed < 300, "runtime < 5 min");
    out.detail << models << " workflows, " << formulas << " formulas, " << agree << " agree, " << violations
               << " violations, " << rejected << " regenerated, " << elapsed << " s";
}

void encoder_equivalence(Outcome& out) {
    const std::vector<std::pair<std::string, int>> fixtures{{"trip.yawl", 1},           {"single.yawl", 1},
                                                            {"cancel_deadlock.yawl", 1}, {"composite.yawl", 1},
                                                            {"mi.yawl", 1},             {"two_token.yawl", 2}};
    for (const auto& [name, bound] : fixtures) {
        const WorkflowSpec spec = load(name);
        const Lts lts = build_lts(compile(spec, bound));
        if (lts.num_states() > 1000)
            continue;
        const bool same = testsupport::lts_traces(lts, 12) == testsupport::reference_traces(spec, bound, 12);
        out.require(same, name);
        out.detail << name << " " << lts.num_states() << (same ? " ok; " : " DIFFERS; ");
    }
}

void counterexample_soundness(Outcome& out) {
    // fixtures and assertions beyond the two runs above
    testsupport::Rng rng(99);
    for (const char* name : {"trip.yawl", "cancel_deadlock.yawl", "composite.yawl", "mi.yawl"}) {
        const WorkflowSpec spec = load(name);
        const Lts& lts = keep(build_lts(compile(spec)));
        const auto alphabet = event_alphabet(spec);
        const std::vector<EventLabel> events(alphabet.begin(), alphabet.end());
        checked(name, lts, {}, parse_formula("[] false"));
        checked(name, lts, {}, parse_formula("<> _terminate"));
        for (int k = 0; k < 50; ++k) {
            const auto fluents = testsupport::random_fluents(rng, alphabet, 2);
            checked(name, lts, fluents, testsupport::random_formula(rng, events, {"F0", "F1"}, 3));
        }
    }
    std::size_t bad = 0;
    for (const auto& w : witnesses) {
        const bool replay = replays(*w.lts, w.verdict.prefix, w.verdict.cycle);
        const bool falsifies =
            !eval_on_lasso(w.formula, w.fluents, w.verdict.prefix, w.verdict.cycle) &&
            !testsupport::oracle_holds(w.formula, w.fluents, EventLasso{w.verdict.prefix, w.verdict.cycle});
        if (!replay || !falsifies) {
            if (bad++ == 0)
                out.detail << "unsound at " << w.where << " on " << to_string(w.formula) << "; ";
        }
    }
    out.require(bad == 0, "every violation replays and falsifies");
    out.require(witnesses.size() >= 100, "enough violations examined");
    out.detail << witnesses.size() << " violations examined, " << bad << " unsound";
}

void scalability(Outcome& out) {
    const WorkflowSpec spec = testsupport::layered_model();
    std::size_t conditions = spec.root.conditions.size(), cancel_regions = 0;
    for (const auto& t : spec.root.tasks)
        cancel_regions += t.cancel_set.empty() ? 0 : 1;
    out.require(spec.root.tasks.size() == 58, "58 tasks");
    out.require(cancel_regions == 2, "2 cancel regions");
    out.require(validate(spec).empty(), "model validates");

    const auto start = Clock::now();
    const Lts lts = build_lts_parallel(compile(spec));
    const double build_s = seconds_since(start);
    const double rss = peak_rss_mb();

    const Catalog catalog = parse_catalog("");
    NameScope scope;
    scope.events = event_alphabet(spec);
    const Formula response =
        instantiate(catalog.at("response"), {{"A", "register.end"}, {"B", "resume.start"}}, scope);
    const auto check_start = Clock::now();
    const Verdict v = check(lts, {}, response);
    const double check_s = seconds_since(check_start);

    out.require(lts.num_states() >= 10'000, ">= 10^4 states");
    out.require(build_s < 5.0, "build < 5 s");
    out.require(rss < 500.0, "peak memory < 500 MB");
    out.require(check_s < 2.0, "response check < 2 s");
    out.require(v.holds, "response holds");
    out.detail << lts.num_states() << " states, " << lts.num_transitions() << " transitions, " << conditions
               << " conditions, build " << build_s << " s, peak " << rss << " MB, check " << check_s << " s";
}

void fsp_golden(Outcome& out) {
    const Lts lts = build_lts(compile(load("trip.yawl")));
    const std::string first = emit_fsp_model(lts, fsp_process_name("trip"));
    const std::string second = emit_fsp_model(build_lts_parallel(compile(load("trip.yawl"))), "TRIP");
    out.require(first == second, "stable across runs");
    out.require(first == read_text(FLOWCHECK_GOLDEN "/trip.fsp"), "golden file");
    const auto process = testsupport::read_fsp(first);
    out.require(process.states.size() == lts.num_states(), "state count");
    out.require(process.num_edges() == lts.num_transitions(), "edge count");
    out.detail << process.states.size() << " states, " << process.num_edges() << " edges";
}

void flp_round_trip(Outcome& out) {
    testsupport::Rng rng(4242);
    int equal = 0;
    for (int i = 0; i < 100; ++i) {
        const PropertySet props = testsupport::random_property_set(rng);
        if (parse_props(emit_fsp_fluents(props)) == props)
            ++equal;
    }
    out.require(equal == 100, "all equal");
    out.detail << equal << "/100 sets";
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"trip end-to-end", trip_end_to_end},
        {"differential checking", differential},
        {"encoder trace equivalence", encoder_equivalence},
        {"counterexample soundness", counterexample_soundness},
        {"scalability", scalability},
        {"fsp export determinism", fsp_golden},
        {"flp round-trip", flp_round_trip},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome outcome;
        try {
            run(outcome);
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.detail << "exception: " << e.what();
        }
        failed += outcome.ok ? 0 : 1;
        std::cout << (outcome.ok ? "PASS " : "FAIL ") << name << ": " << outcome.detail.str() << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
