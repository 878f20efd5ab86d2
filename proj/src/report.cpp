#include "stw/report.hpp"

#include <cstdio>

namespace stw {

bool VerificationReport::overall_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json tol = nlohmann::json::object();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        tol[c.id] = c.tolerance;
        nlohmann::json jc = {{"id", c.id},
                             {"anchor", c.anchor},
                             {"samples", c.samples},
                             {"max_residual", c.max_residual},
                             {"tolerance", c.tolerance},
                             {"pass", c.pass},
                             {"note", c.note}};
        arr.push_back(jc);
    }
    return nlohmann::json{{"schema", "stl-report/1"},
                          {"command", command},
                          {"input", input},
                          {"payload", payload},
                          {"seed", seed},
                          {"tol_scale", tol_scale},
                          {"t", t},
                          {"samples", samples},
                          {"tolerances", tol},
                          {"checks", arr},
                          {"overall_pass", overall_pass()},
                          {"wall_time_ms", wall_ms}};
}

std::string VerificationReport::human_table() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-34s %-18s %8s %12s %12s  %s\n", "check", "anchor", "samples",
                  "residual", "tolerance", "status");
    out += buf;
    out += std::string(96, '-') + "\n";
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%-34s %-18s %8d %12.3e %12.3e  %s\n", c.id.c_str(),
                      c.anchor.c_str(), c.samples, c.max_residual, c.tolerance,
                      c.pass ? "pass" : "FAIL");
        out += buf;
        if (!c.note.empty()) out += "    note: " + c.note + "\n";
    }
    std::snprintf(buf, sizeof buf, "overall: %s (%.1f ms)\n", overall_pass() ? "pass" : "FAIL",
                  wall_ms);
    out += buf;
    return out;
}

}  // namespace stw
