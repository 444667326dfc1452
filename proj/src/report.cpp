#include "rnlab/report.hpp"

#include <filesystem>
#include <fstream>

#include "rnlab/io.hpp"

namespace rnlab {

namespace {

void write_table_csv(const MetricTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // fixed newlines on every platform
    if (!out) throw std::runtime_error("cannot open " + path);
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << io::fmt(row[c]) << (c + 1 < row.size() ? "," : "");
        out << '\n';
    }
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::string& out_dir,
                 const std::string& format) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const bool want_csv = (format == "csv" || format == "both");
    const bool want_text = (format == "structured-text" || format == "both");
    if (!want_csv && !want_text)
        throw ConfigError("emit_report: format must be csv, structured-text, or both");

    if (want_csv)
        for (const auto& table : report.tables)
            write_table_csv(table, out_dir + "/" + table.name + ".csv");

    if (want_text) {
        std::ofstream out(out_dir + "/report.txt", std::ios::binary);
        if (!out) throw std::runtime_error("cannot open report.txt in " + out_dir);
        out << "scenario: " << report.scenario << '\n';
        out << "seed: " << report.seed << '\n';
        out << "\n[config]\n" << report.config_echo;
        for (const auto& note : report.notes) out << "\nnote: " << note << '\n';
        for (const auto& table : report.tables) {
            out << "\n[table " << table.name << "]\n";
            for (std::size_t c = 0; c < table.columns.size(); ++c)
                out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
            out << '\n';
            for (const auto& row : table.rows) {
                for (std::size_t c = 0; c < row.size(); ++c)
                    out << io::fmt(row[c]) << (c + 1 < row.size() ? "," : "");
                out << '\n';
            }
        }
        out << "\n[checks]\n";
        for (const auto& [name, ok] : report.checks)
            out << name << ": " << (ok ? "pass" : "FAIL") << '\n';
        out << "\noverall: " << (report.all_passed() ? "pass" : "FAIL") << '\n';
    }
}

}  // namespace rnlab
