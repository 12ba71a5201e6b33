#pragma once

#include "flowcheck/encoder.hpp"
#include "flowcheck/fltl.hpp"

#include <memory>
#include <string>

namespace flowcheck {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080; // 0 picks a free port
    std::string templates_path; // empty: built-in catalog only
    int default_bound = 1;
    std::size_t max_states = BuildLimits{}.max_states;
    std::size_t max_product_states = CheckOptions{}.max_product_states;
    std::string data_dir;   // one subdirectory per session when set
    std::string static_dir; // served at / when set
    unsigned workers = 2;
};

/// HTTP/JSON front end:
///   POST /models                          YAWL body -> {sessionId, diagnostics}
///   GET  /models/{id}/graph
///   GET  /models/{id}/alphabet
///   GET|PUT /models/{id}/fluents
///   GET|PUT /models/{id}/assertions
///   PUT  /models/{id}/props               .flp body, replaces fluents and assertions
///   GET  /models/{id}/export.flp
///   POST /models/{id}/check               {assertion, bound?, maxStates?} -> {jobId}
///   GET  /jobs/{id}
///   GET  /templates
///   POST /templates/{tid}/instantiate     {sessionId, bindings, name?}
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket and returns the port. Throws Error on failure.
    int bind();
    /// Serves until stop(); call bind() first.
    void listen();
    void stop();

    std::size_t session_count() const;
    /// Number of LTS constructions performed so far (cache misses).
    std::size_t builds() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace flowcheck
