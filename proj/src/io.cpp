#include "kerrsim/io.hpp"

#include <cstdio>
#include <fstream>

#include "kerrsim/errors.hpp"

namespace kerrsim {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << columns[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw DimensionMismatch("write_csv: row width does not match header");
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
    if (!out.good()) throw ConfigError("write failed: " + path);
}

void write_sidecar(const std::string& csv_path, const nlohmann::json& meta) {
    std::string path = csv_path + ".meta.json";
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << meta.dump(2) << '\n';
    if (!out.good()) throw ConfigError("write failed: " + path);
}

void write_qfi_report(const std::string& csv_path, const QfiReport& report,
                      const nlohmann::json& extra_meta) {
    std::vector<std::vector<double>> rows;
    rows.reserve(report.n_bar.size());
    for (Eigen::Index i = 0; i < report.n_bar.size(); ++i)
        rows.push_back({report.n_bar(i), report.f_classical(i), report.f_quantum_avg(i),
                        report.f_total(i), report.eta(i)});
    write_csv(csv_path, {"n_bar", "F_classical", "F_quantum", "F_total", "eta"}, rows);

    nlohmann::json meta{
        {"parameter", report.meta.parameter},
        {"r", report.meta.r},
        {"theta0", report.meta.theta0},
        {"g", report.meta.g},
        {"correction", report.meta.correction},
        {"n_trunc", report.meta.n_trunc},
        {"m_window", {report.meta.m_lo, report.meta.m_hi}},
    };
    if (!extra_meta.is_null())
        for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it)
            meta[it.key()] = it.value();
    write_sidecar(csv_path, meta);
}

}  // namespace kerrsim
