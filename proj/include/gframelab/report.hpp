#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gframelab/errors.hpp"

// Machine- and human-readable report emitted by the CLI. Deterministic by
// construction: maps keep keys sorted and numbers are printed with a fixed
// round-trip format.

namespace gframelab {

inline constexpr int kReportFormatVersion = 1;

struct Report {
    std::string command;
    std::string scenario_label;
    std::uint64_t seed = 0;
    int format_version = kReportFormatVersion;
    std::map<std::string, bool> verdicts;
    std::map<std::string, double> metrics;
    std::map<std::string, double> tolerances;  // tolerance each verdict was judged against
    std::vector<std::string> notes;
};

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline nlohmann::json report_to_json(const Report& r) {
    nlohmann::json j;
    j["format"] = "gframe-lab/report";
    j["format_version"] = r.format_version;
    j["command"] = r.command;
    j["scenario_label"] = r.scenario_label;
    j["seed"] = r.seed;
    j["verdicts"] = r.verdicts;
    j["metrics"] = r.metrics;
    j["tolerances"] = r.tolerances;
    j["notes"] = r.notes;
    return j;
}

inline std::string report_to_text(const Report& r) {
    std::string out;
    out += "gframe-lab report (format_version " + std::to_string(r.format_version) + ")\n";
    out += "command:  " + r.command + "\n";
    out += "scenario: " + r.scenario_label + "\n";
    out += "seed:     " + std::to_string(r.seed) + "\n";
    if (!r.verdicts.empty()) {
        out += "verdicts:\n";
        for (const auto& [name, value] : r.verdicts)
            out += "  " + name + ": " + (value ? "true" : "false") + "\n";
    }
    if (!r.metrics.empty()) {
        out += "metrics:\n";
        for (const auto& [name, value] : r.metrics)
            out += "  " + name + " = " + format_double(value) + "\n";
    }
    if (!r.tolerances.empty()) {
        out += "tolerances:\n";
        for (const auto& [name, value] : r.tolerances)
            out += "  " + name + " = " + format_double(value) + "\n";
    }
    for (const std::string& note : r.notes) out += "note: " + note + "\n";
    return out;
}

}  // namespace gframelab
