#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace stw {

struct CheckRecord {
    std::string id;
    std::string anchor;   // statement label the check verifies
    int samples = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;  // empty unless the check carries an annotation
};

struct VerificationReport {
    std::string command;
    nlohmann::json input;  // echo of the effective inputs
    nlohmann::json payload = nlohmann::json::object();  // optional verbose output
    uint64_t seed = 42;
    double tol_scale = 1.0;
    double t = 1.0;
    int samples = 200;
    std::vector<CheckRecord> checks;
    double wall_ms = 0.0;

    bool overall_pass() const;
    nlohmann::json to_json() const;    // schema stl-report/1
    std::string human_table() const;
};

}  // namespace stw
