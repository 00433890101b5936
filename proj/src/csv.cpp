#include "acda/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace acda {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::invalid_argument("CSV table has no column '" + name + "'");
}

const std::string& CsvTable::text(std::size_t row, const std::string& name) const {
    if (row >= rows.size()) throw std::out_of_range("CSV row out of range");
    return rows[row].at(column(name));
}

double CsvTable::number(std::size_t row, const std::string& name) const {
    const std::string& s = text(row, name);
    if (s == "nan" || s.empty()) return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::invalid_argument("CSV column '" + name + "': '" + s + "' is not a number");
    return v;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << '#';
    for (const auto& [k, v] : table.metadata) out << ' ' << k << '=' << v;
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    if (!out) throw std::runtime_error("error while writing '" + path.string() + "'");
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::istringstream meta(line.substr(1));
            std::string pair;
            while (meta >> pair) {
                const auto eq = pair.find('=');
                if (eq != std::string::npos) table.metadata[pair.substr(0, eq)] = pair.substr(eq + 1);
            }
            continue;
        }
        if (!have_header) {
            table.columns = split(line, ',');
            have_header = true;
            continue;
        }
        auto row = split(line, ',');
        if (row.size() != table.columns.size())
            throw std::invalid_argument("'" + path.string() + "': row width differs from header");
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::invalid_argument("'" + path.string() + "': missing column header");
    return table;
}

CsvTable run_record_table(const RunRecord& record, std::map<std::string, std::string> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.metadata["converged_at"] = record.converged_at ? format_double(*record.converged_at) : "none";
    t.metadata["threshold"] = format_double(record.threshold);
    t.columns = {"time", "l2_error", "linf_error"};
    const bool probe = !record.probe_positions.empty();
    if (probe) t.columns.push_back("probe_position");
    for (std::size_t i = 0; i < record.size(); ++i) {
        std::vector<std::string> row{format_double(record.times[i]), format_double(record.l2_errors[i]),
                                     format_double(record.linf_errors[i])};
        if (probe) row.push_back(std::to_string(record.probe_positions[i]));
        t.rows.push_back(std::move(row));
    }
    return t;
}

RunRecord read_run_record(const CsvTable& table) {
    RunRecord rec;
    const bool probe = std::find(table.columns.begin(), table.columns.end(), "probe_position") != table.columns.end();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        rec.times.push_back(table.number(i, "time"));
        rec.l2_errors.push_back(table.number(i, "l2_error"));
        rec.linf_errors.push_back(table.number(i, "linf_error"));
        if (probe) rec.probe_positions.push_back(static_cast<std::size_t>(table.number(i, "probe_position")));
    }
    if (auto it = table.metadata.find("threshold"); it != table.metadata.end()) rec.threshold = std::stod(it->second);
    if (auto it = table.metadata.find("converged_at"); it != table.metadata.end() && it->second != "none")
        rec.converged_at = std::stod(it->second);
    return rec;
}

CsvTable field_table(const Field& field, std::map<std::string, std::string> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.metadata["time"] = format_double(field.time);
    t.columns = {"x", "u"};
    for (std::size_t k = 0; k < field.values.size(); ++k)
        t.rows.push_back({format_double(field.x(k)), format_double(field.values[k])});
    return t;
}

CsvTable min_nodes_table(const std::vector<MinNodesResult>& results, std::map<std::string, std::string> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.columns = {"nu", "seed", "obs_kind", "m_h", "spin_up_time", "probes", "error"};
    for (const auto& r : results) {
        for (const auto& trial : r.trials) {
            std::string probes;
            for (const auto& [m, ok] : trial.probes) {
                if (!probes.empty()) probes += ';';
                probes += std::to_string(m) + ':' + (ok ? '1' : '0');
            }
            std::string err = trial.error;
            for (char& ch : err)
                if (ch == ',' || ch == '\n') ch = ' ';
            t.rows.push_back({format_double(r.nu), std::to_string(trial.seed), std::string(to_string(r.obs_kind)),
                              trial.m_h ? std::to_string(*trial.m_h) : "none", format_double(trial.spin_up_time),
                              probes, err});
        }
    }
    return t;
}

std::vector<std::pair<double, double>> read_min_nodes_pairs(const CsvTable& table) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::string& mh = table.text(i, "m_h");
        if (mh == "none" || mh.empty()) continue;
        out.emplace_back(table.number(i, "nu"), table.number(i, "m_h"));
    }
    return out;
}

CsvTable velocity_table(const std::vector<VelocityResult>& results, std::map<std::string, std::string> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.columns = {"c", "m", "converge_time", "locked"};
    for (const auto& r : results)
        t.rows.push_back({format_double(r.c), std::to_string(r.m),
                          r.converge_time ? format_double(*r.converge_time) : "nan", r.locked ? "1" : "0"});
    return t;
}

CsvTable probe_size_table(const ProbeSizeStudy& study, std::map<std::string, std::string> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    if (study.exponent) {
        t.metadata["fit_prefactor"] = format_double(*study.prefactor);
        t.metadata["fit_exponent"] = format_double(*study.exponent);
    }
    t.columns = {"m", "mean_time", "n_converged"};
    for (const auto& row : study.rows)
        t.rows.push_back({std::to_string(row.m), row.mean_time ? format_double(*row.mean_time) : "nan",
                          std::to_string(row.n_converged)});
    return t;
}

CsvTable fit_table(const PowerLawFit& fit, std::map<std::string, std::string> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.columns = {"c0", "p", "log_residual_std", "band_factor", "n_points", "p_stderr", "log_c0_stderr", "nu_min",
                 "nu_max"};
    t.rows.push_back({format_double(fit.c0), format_double(fit.p), format_double(fit.log_residual_std),
                      format_double(std::exp(fit.log_residual_std)), std::to_string(fit.n_points),
                      format_double(fit.p_stderr), format_double(fit.log_c0_stderr), format_double(fit.nu_min),
                      format_double(fit.nu_max)});
    return t;
}

PowerLawFit read_fit(const CsvTable& table) {
    if (table.rows.empty()) throw std::invalid_argument("fit table is empty");
    PowerLawFit fit;
    fit.c0 = table.number(0, "c0");
    fit.p = table.number(0, "p");
    fit.log_residual_std = table.number(0, "log_residual_std");
    fit.n_points = static_cast<std::size_t>(table.number(0, "n_points"));
    fit.p_stderr = table.number(0, "p_stderr");
    fit.log_c0_stderr = table.number(0, "log_c0_stderr");
    fit.nu_min = table.number(0, "nu_min");
    fit.nu_max = table.number(0, "nu_max");
    return fit;
}

CsvTable lambda_table(const std::vector<LengthScaleEstimate>& estimates, std::map<std::string, std::string> metadata) {
    CsvTable t;
    t.metadata = std::move(metadata);
    t.columns = {"nu", "lambda", "n_s", "extrapolated"};
    for (const auto& e : estimates)
        t.rows.push_back({format_double(e.nu), format_double(e.lambda), std::to_string(e.n_s), e.extrapolated ? "1" : "0"});
    return t;
}

}  // namespace acda
