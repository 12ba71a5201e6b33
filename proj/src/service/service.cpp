#include "flowcheck/service.hpp"

#include "flowcheck/fsp.hpp"
#include "flowcheck/templates.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace flowcheck {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

using LtsFuture = std::shared_future<std::shared_ptr<const Lts>>;

struct Session {
    std::string id;
    std::string model_xml;
    WorkflowSpec spec; // normalized; never changes after creation
    std::set<EventLabel> alphabet;
    std::vector<FluentDef> builtin_fluents;
    std::vector<Diagnostic> diagnostics;

    mutable std::mutex mutex;
    PropertySet props;
    std::map<int, LtsFuture> lts;
};

enum class JobStatus { Queued, Running, Done, Failed };

const char* to_string(JobStatus s) {
    switch (s) {
    case JobStatus::Queued: return "queued";
    case JobStatus::Running: return "running";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
    }
    return "failed";
}

struct Job {
    std::string id;
    std::string session;
    std::string assertion;
    int bound = 1;
    std::size_t max_states = 0;
    JobStatus status = JobStatus::Queued;
    std::optional<Verdict> verdict;
    std::string error;
};

/// Request failures carried to the HTTP layer.
struct HttpError {
    int status;
    json body;
};

[[noreturn]] void fail(int status, const std::string& kind, const std::string& message, json extra = {}) {
    json body{{"error", kind}, {"message", message}};
    if (!extra.is_null())
        body.update(extra);
    throw HttpError{status, std::move(body)};
}

json to_json(const Diagnostic& d) {
    return json{{"severity", to_string(d.severity)}, {"kind", d.kind}, {"node", d.node}, {"message", d.message}};
}

json to_json(const std::vector<Diagnostic>& diagnostics) {
    json out = json::array();
    for (const auto& d : diagnostics)
        out.push_back(to_json(d));
    return out;
}

json to_json(const FluentDef& f) {
    return json{{"name", f.name}, {"initiating", f.initiating}, {"terminating", f.terminating}, {"initially", f.initially}};
}

json verdict_json(const std::string& name, const Verdict& v) {
    return json{{"name", name}, {"result", v.holds ? "holds" : "violation"}, {"prefix", v.prefix}, {"cycle", v.cycle}};
}

json to_json(const Job& job) {
    json out{{"id", job.id}, {"sessionId", job.session}, {"assertion", job.assertion}, {"bound", job.bound},
             {"status", to_string(job.status)}};
    if (job.verdict)
        out["result"] = verdict_json(job.assertion, *job.verdict);
    if (!job.error.empty())
        out["error"] = job.error;
    return out;
}

json to_json(const Template& t) {
    json params = json::array();
    for (const auto& p : t.params)
        params.push_back(json{{"name", p.name}, {"kind", p.kind}});
    return json{{"id", t.id},
                {"title", t.title},
                {"description", t.description},
                {"params", params},
                {"skeleton", to_string(t.skeleton)}};
}

json graph_json(const WorkflowSpec& spec) {
    json nets = json::array();
    for_each_net_instance(spec, [&](const NetInstance& inst) {
        json nodes = json::array();
        for (const auto& c : inst.net.conditions) {
            const char* kind = c.kind == ConditionKind::Input    ? "input"
                               : c.kind == ConditionKind::Output ? "output"
                               : c.kind == ConditionKind::Implicit ? "implicit"
                                                                   : "plain";
            nodes.push_back(json{{"id", c.id}, {"type", "condition"}, {"conditionKind", kind}});
        }
        for (const auto& t : inst.net.tasks) {
            const std::string path = inst.prefix + t.id;
            json node{{"id", t.id},
                      {"type", "task"},
                      {"path", path},
                      {"join", to_string(t.join)},
                      {"split", to_string(t.split)},
                      {"cancels", t.cancel_set},
                      {"ports", json{{"start", path + ".start"}, {"end", path + ".end"}}}};
            node["multiInstance"] =
                t.mi ? json{{"min", t.mi->min}, {"max", t.mi->max}, {"threshold", t.mi->threshold}} : json(nullptr);
            node["composite"] = t.subnet ? json(*t.subnet) : json(nullptr);
            nodes.push_back(std::move(node));
        }
        json arcs = json::array();
        for (const auto& a : inst.net.flows)
            arcs.push_back(json{{"from", a.from}, {"to", a.to}});
        nets.push_back(json{{"id", inst.net.id},
                            {"prefix", inst.prefix},
                            {"root", inst.depth == 0},
                            {"nodes", nodes},
                            {"arcs", arcs}});
    });
    return json{{"nets", nets}};
}

json parse_body(const httplib::Request& req) {
    try {
        return json::parse(req.body);
    } catch (const json::parse_error& e) {
        fail(400, "MalformedJson", e.what());
    }
}

} // namespace

struct Service::Impl {
    explicit Impl(ServiceConfig c) : config(std::move(c)) {
        if (config.workers == 0)
            config.workers = 1;
        catalog = config.templates_path.empty() ? parse_catalog("") : load_catalog(config.templates_path);
        if (!config.data_dir.empty())
            restore();
        for (unsigned i = 0; i < config.workers; ++i)
            workers.emplace_back([this] { work(); });
        routes();
    }

    ~Impl() {
        server.stop();
        {
            std::lock_guard lock(queue_mutex);
            stopping = true;
        }
        queue_cv.notify_all();
        for (auto& w : workers)
            w.join();
    }

    // ---- sessions ----

    std::string fresh_id() {
        std::lock_guard lock(id_mutex);
        std::ostringstream out;
        out << std::hex << rng();
        return out.str();
    }

    std::shared_ptr<Session> make_session(std::string id, std::string xml) {
        auto s = std::make_shared<Session>();
        s->id = std::move(id);
        s->spec = normalize(parse_yawl(xml));
        s->model_xml = std::move(xml);
        s->alphabet = event_alphabet(s->spec);
        s->builtin_fluents = executing_fluents(s->spec);
        s->diagnostics = validate(s->spec);
        return s;
    }

    std::shared_ptr<Session> session(const std::string& id) {
        std::lock_guard lock(sessions_mutex);
        auto it = sessions.find(id);
        if (it == sessions.end())
            fail(404, "UnknownSession", "no session '" + id + "'");
        return it->second;
    }

    /// Diagnostics for a candidate property set against the session's model.
    static std::vector<Diagnostic> check_props(const Session& s, const PropertySet& props) {
        auto out = validate_fluents(props.fluents, s.alphabet);
        std::vector<FluentDef> known = props.fluents;
        known.insert(known.end(), s.builtin_fluents.begin(), s.builtin_fluents.end());
        std::set<std::string> names;
        for (const auto& f : props.fluents)
            names.insert(f.name);
        for (const auto& a : props.assertions) {
            if (!is_identifier(a.name) || is_event_name(a.name))
                out.push_back(Diagnostic{Severity::Error, "InvalidName", a.name, "not a valid assertion name"});
            if (!names.insert(a.name).second)
                out.push_back(Diagnostic{Severity::Error, "DuplicateName", a.name, "name already in use"});
            for (auto& d : validate_formula(a.formula, known, s.alphabet, a.name))
                out.push_back(std::move(d));
        }
        return out;
    }

    void store_props(Session& s, PropertySet props) {
        const auto diagnostics = check_props(s, props);
        if (!diagnostics.empty())
            fail(400, "InvalidProperties", "properties do not match the model",
                 json{{"diagnostics", to_json(diagnostics)}});
        s.props = std::move(props);
        persist_props(s);
    }

    // ---- persistence ----

    void persist_model(const Session& s) {
        if (config.data_dir.empty())
            return;
        const fs::path dir = fs::path(config.data_dir) / s.id;
        fs::create_directories(dir);
        std::ofstream(dir / "model.yawl", std::ios::binary) << s.model_xml;
        std::ofstream(dir / "props.flp", std::ios::binary) << emit_fsp_fluents(s.props);
    }

    // Called with s.mutex held.
    void persist_props(const Session& s) {
        if (config.data_dir.empty())
            return;
        std::ofstream(fs::path(config.data_dir) / s.id / "props.flp", std::ios::binary) << emit_fsp_fluents(s.props);
    }

    void restore() {
        fs::create_directories(config.data_dir);
        for (const auto& entry : fs::directory_iterator(config.data_dir)) {
            if (!entry.is_directory() || !fs::exists(entry.path() / "model.yawl"))
                continue;
            try {
                std::stringstream model, props;
                model << std::ifstream(entry.path() / "model.yawl", std::ios::binary).rdbuf();
                auto s = make_session(entry.path().filename().string(), model.str());
                if (fs::exists(entry.path() / "props.flp")) {
                    props << std::ifstream(entry.path() / "props.flp", std::ios::binary).rdbuf();
                    PropertySet set = parse_props(props.str());
                    if (check_props(*s, set).empty())
                        s->props = std::move(set);
                }
                sessions.emplace(s->id, std::move(s));
            } catch (const Error&) {
                // unreadable sessions stay on disk untouched
            }
        }
    }

    // ---- LTS cache ----

    std::shared_ptr<const Lts> lts_for(const std::shared_ptr<Session>& s, int bound, std::size_t max_states) {
        std::promise<std::shared_ptr<const Lts>> promise;
        LtsFuture future;
        bool owner = false;
        {
            std::lock_guard lock(s->mutex);
            auto it = s->lts.find(bound);
            if (it == s->lts.end()) {
                future = promise.get_future().share();
                s->lts.emplace(bound, future);
                owner = true;
            } else {
                future = it->second;
            }
        }
        if (owner) {
            try {
                ++build_count;
                promise.set_value(
                    std::make_shared<const Lts>(build_lts_parallel(compile(s->spec, bound), BuildLimits{max_states})));
            } catch (...) {
                {
                    std::lock_guard lock(s->mutex);
                    s->lts.erase(bound); // a later request may retry with other limits
                }
                promise.set_exception(std::current_exception());
            }
        }
        return future.get();
    }

    // ---- jobs ----

    std::string enqueue(Job job) {
        {
            std::lock_guard lock(jobs_mutex);
            job.id = "job-" + std::to_string(++job_counter);
            jobs.emplace(job.id, job);
        }
        {
            std::lock_guard lock(queue_mutex);
            queue.push_back(job.id);
        }
        queue_cv.notify_one();
        return job.id;
    }

    void work() {
        for (;;) {
            std::string id;
            {
                std::unique_lock lock(queue_mutex);
                queue_cv.wait(lock, [&] { return stopping || !queue.empty(); });
                if (stopping)
                    return;
                id = queue.front();
                queue.pop_front();
            }
            Job job;
            {
                std::lock_guard lock(jobs_mutex);
                auto& stored = jobs.at(id);
                stored.status = JobStatus::Running;
                job = stored;
            }
            std::optional<Verdict> verdict;
            std::string error;
            try {
                verdict = run_check(job);
            } catch (const std::exception& e) {
                error = e.what();
            }
            std::lock_guard lock(jobs_mutex);
            auto& stored = jobs.at(id);
            stored.verdict = std::move(verdict);
            stored.error = std::move(error);
            stored.status = stored.verdict ? JobStatus::Done : JobStatus::Failed;
        }
    }

    Verdict run_check(const Job& job) {
        auto s = session(job.session);
        Assertion assertion;
        std::vector<FluentDef> declared;
        {
            std::lock_guard lock(s->mutex);
            const Assertion* a = s->props.find_assertion(job.assertion);
            if (!a)
                throw Error("assertion '" + job.assertion + "' was removed");
            assertion = *a;
            declared = s->props.fluents;
        }
        const auto lts = lts_for(s, job.bound, job.max_states);
        Verdict v = check(*lts, resolve_fluents(assertion.formula, declared, s->spec), assertion.formula,
                          CheckOptions{config.max_product_states});
        if (!v.holds && !replays(*lts, v.prefix, v.cycle))
            throw std::logic_error("counterexample does not replay");
        return v;
    }

    // ---- HTTP ----

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    Handler wrap(Handler inner) {
        return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
            try {
                inner(req, res);
            } catch (const HttpError& e) {
                res.status = e.status;
                res.set_content(e.body.dump(), "application/json");
            } catch (const std::exception& e) {
                res.status = 500;
                res.set_content(json{{"error", "Internal"}, {"message", e.what()}}.dump(), "application/json");
            }
        };
    }

    static void reply(httplib::Response& res, const json& body, int status = 200) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    void routes() {
        server.Post("/models", wrap([this](const httplib::Request& req, httplib::Response& res) {
            std::shared_ptr<Session> s;
            try {
                s = make_session(fresh_id(), req.body);
            } catch (const ParseError& e) {
                fail(422, to_string(e.kind()), e.what());
            }
            persist_model(*s);
            const json body{{"sessionId", s->id}, {"diagnostics", to_json(s->diagnostics)}};
            {
                std::lock_guard lock(sessions_mutex);
                sessions.emplace(s->id, s);
            }
            reply(res, body);
        }));

        server.Get("/models/:id/graph", wrap([this](const httplib::Request& req, httplib::Response& res) {
            reply(res, graph_json(session(req.path_params.at("id"))->spec));
        }));

        server.Get("/models/:id/alphabet", wrap([this](const httplib::Request& req, httplib::Response& res) {
            reply(res, json(session(req.path_params.at("id"))->alphabet));
        }));

        server.Get("/models/:id/fluents", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto s = session(req.path_params.at("id"));
            std::lock_guard lock(s->mutex);
            json out = json::array();
            for (const auto& f : s->props.fluents)
                out.push_back(to_json(f));
            reply(res, out);
        }));

        server.Put("/models/:id/fluents", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto s = session(req.path_params.at("id"));
            const json body = parse_body(req);
            std::vector<FluentDef> fluents;
            try {
                for (const auto& f : body) {
                    fluents.push_back(FluentDef{f.at("name").get<std::string>(),
                                                f.value("initiating", std::vector<std::string>{}),
                                                f.value("terminating", std::vector<std::string>{}),
                                                f.value("initially", false)});
                }
            } catch (const json::exception& e) {
                fail(400, "MalformedJson", e.what());
            }
            std::lock_guard lock(s->mutex);
            PropertySet next = s->props;
            next.fluents = std::move(fluents);
            store_props(*s, std::move(next));
            json out = json::array();
            for (const auto& f : s->props.fluents)
                out.push_back(to_json(f));
            reply(res, out);
        }));

        server.Get("/models/:id/assertions", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto s = session(req.path_params.at("id"));
            std::lock_guard lock(s->mutex);
            reply(res, assertions_json(*s));
        }));

        server.Put("/models/:id/assertions", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto s = session(req.path_params.at("id"));
            const json body = parse_body(req);
            std::vector<Assertion> assertions;
            try {
                for (const auto& a : body) {
                    const std::string name = a.at("name").get<std::string>();
                    try {
                        assertions.push_back(Assertion{name, parse_formula(a.at("formula").get<std::string>())});
                    } catch (const SyntaxError& e) {
                        fail(400, "SyntaxError", e.what(), json{{"assertion", name}});
                    }
                }
            } catch (const json::exception& e) {
                fail(400, "MalformedJson", e.what());
            }
            std::lock_guard lock(s->mutex);
            PropertySet next = s->props;
            next.assertions = std::move(assertions);
            store_props(*s, std::move(next));
            reply(res, assertions_json(*s));
        }));

        server.Put("/models/:id/props", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto s = session(req.path_params.at("id"));
            PropertySet props;
            try {
                props = parse_props(req.body);
            } catch (const SyntaxError& e) {
                fail(400, "SyntaxError", e.what());
            } catch (const DuplicateName& e) {
                fail(400, "DuplicateName", e.what());
            }
            std::lock_guard lock(s->mutex);
            store_props(*s, std::move(props));
            reply(res, json{{"fluents", s->props.fluents.size()}, {"assertions", s->props.assertions.size()}});
        }));

        server.Get("/models/:id/export.flp", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto s = session(req.path_params.at("id"));
            std::lock_guard lock(s->mutex);
            res.set_content(emit_fsp_fluents(s->props), "text/plain");
        }));

        server.Post("/models/:id/check", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto s = session(req.path_params.at("id"));
            const json body = parse_body(req);
            Job job;
            job.session = s->id;
            try {
                job.assertion = body.at("assertion").get<std::string>();
                job.bound = body.value("bound", config.default_bound);
                job.max_states = body.value("maxStates", config.max_states);
            } catch (const json::exception& e) {
                fail(400, "MalformedJson", e.what());
            }
            if (job.bound < 1)
                fail(400, "InvalidBound", "bound must be at least 1");
            {
                std::lock_guard lock(s->mutex);
                if (!s->props.find_assertion(job.assertion))
                    fail(409, "UnknownAssertion", "no assertion named '" + job.assertion + "'");
            }
            reply(res, json{{"jobId", enqueue(std::move(job))}}, 202);
        }));

        server.Get("/jobs/:id", wrap([this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(jobs_mutex);
            auto it = jobs.find(req.path_params.at("id"));
            if (it == jobs.end())
                fail(404, "UnknownJob", "no job '" + req.path_params.at("id") + "'");
            reply(res, to_json(it->second));
        }));

        server.Get("/templates", wrap([this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& t : catalog.templates)
                out.push_back(to_json(t));
            reply(res, out);
        }));

        server.Post("/templates/:tid/instantiate", wrap([this](const httplib::Request& req, httplib::Response& res) {
            const Template* t = catalog.find(req.path_params.at("tid"));
            if (!t)
                fail(404, "UnknownTemplate", "no template '" + req.path_params.at("tid") + "'");
            const json body = parse_body(req);
            std::map<std::string, std::string> bindings;
            std::string session_id, name;
            try {
                session_id = body.at("sessionId").get<std::string>();
                bindings = body.value("bindings", std::map<std::string, std::string>{});
                name = body.value("name", assertion_name_for(t->id));
            } catch (const json::exception& e) {
                fail(400, "MalformedJson", e.what());
            }
            auto s = session(session_id);
            std::lock_guard lock(s->mutex);
            NameScope scope{s->alphabet, {}, false};
            for (const auto& f : s->props.fluents)
                scope.fluents.insert(f.name);
            for (const auto& f : s->builtin_fluents)
                scope.fluents.insert(f.name);
            Formula formula;
            try {
                formula = instantiate(*t, bindings, scope);
            } catch (const CatalogError& e) {
                fail(400, e.kind() == CatalogError::Kind::MissingBinding ? "MissingBinding" : "UnknownName",
                     e.what());
            }
            PropertySet next = s->props;
            next.assertions.push_back(Assertion{name, formula});
            store_props(*s, std::move(next));
            reply(res, json{{"name", name}, {"formula", to_string(formula)}});
        }));

        if (!config.static_dir.empty())
            server.set_mount_point("/", config.static_dir);
    }

    static json assertions_json(const Session& s) {
        json out = json::array();
        for (const auto& a : s.props.assertions)
            out.push_back(json{{"name", a.name}, {"formula", to_string(a.formula)}});
        return out;
    }

    ServiceConfig config;
    Catalog catalog;
    httplib::Server server;

    std::mutex id_mutex;
    std::mt19937_64 rng{std::random_device{}()};

    mutable std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Session>> sessions;

    std::mutex jobs_mutex;
    std::map<std::string, Job> jobs;
    std::size_t job_counter = 0;

    std::mutex queue_mutex;
    std::condition_variable queue_cv;
    std::deque<std::string> queue;
    bool stopping = false;
    std::vector<std::thread> workers;

    std::atomic<std::size_t> build_count{0};
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() = default;

int Service::bind() {
    auto& c = impl_->config;
    if (c.port == 0) {
        const int port = impl_->server.bind_to_any_port(c.host);
        if (port < 0)
            throw Error("cannot bind " + c.host);
        c.port = port;
    } else if (!impl_->server.bind_to_port(c.host, c.port)) {
        throw Error("cannot bind " + c.host + ":" + std::to_string(c.port));
    }
    return c.port;
}

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

std::size_t Service::session_count() const {
    std::lock_guard lock(impl_->sessions_mutex);
    return impl_->sessions.size();
}

std::size_t Service::builds() const { return impl_->build_count.load(); }

} // namespace flowcheck
