#pragma once

#include <string>
#include <vector>

#include "rnlab/config.hpp"

namespace rnlab {

struct MetricTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Structured result of one scenario: config echo, metric tables, and a
/// pass/fail flag per acceptance check. Wall-clock time is kept out of the
/// emitted files so reruns are byte-identical.
struct ExperimentReport {
    std::string scenario;
    std::string config_echo;
    std::uint64_t seed = 0;
    std::vector<MetricTable> tables;
    std::vector<std::pair<std::string, bool>> checks;
    std::vector<std::string> notes;
    double wall_seconds = 0.0;

    bool all_passed() const {
        for (const auto& [name, ok] : checks)
            if (!ok) return false;
        return true;
    }
};

/// Writes report.txt plus one CSV per metric table into out_dir; format is
/// "csv" (tables only) or "structured-text" (report.txt only) or "both".
void emit_report(const ExperimentReport& report, const std::string& out_dir,
                 const std::string& format = "both");

}  // namespace rnlab
