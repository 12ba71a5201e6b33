#pragma once

#include "flowcheck/workflow.hpp"

#include <fstream>
#include <sstream>
#include <string>

inline std::string fixture_path(const std::string& name) { return std::string(FLOWCHECK_FIXTURES) + "/" + name; }

inline std::string fixture_text(const std::string& name) {
    std::ifstream in(fixture_path(name), std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline flowcheck::WorkflowSpec fixture_model(const std::string& name) {
    return flowcheck::normalize(flowcheck::parse_yawl(fixture_text(name)));
}
