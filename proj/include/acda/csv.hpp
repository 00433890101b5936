#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "acda/assimilation.hpp"
#include "acda/experiments.hpp"
#include "acda/analysis.hpp"

namespace acda {

/// A CSV table with a leading "# k=v k=v ..." metadata line.
struct CsvTable {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
    const std::string& text(std::size_t row, const std::string& name) const;
};

/// Shortest decimal form that round-trips at 17 significant digits.
std::string format_double(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

CsvTable run_record_table(const RunRecord& record, std::map<std::string, std::string> metadata);
CsvTable field_table(const Field& field, std::map<std::string, std::string> metadata);
CsvTable min_nodes_table(const std::vector<MinNodesResult>& results, std::map<std::string, std::string> metadata);
CsvTable velocity_table(const std::vector<VelocityResult>& results, std::map<std::string, std::string> metadata);
CsvTable probe_size_table(const ProbeSizeStudy& study, std::map<std::string, std::string> metadata);
CsvTable fit_table(const PowerLawFit& fit, std::map<std::string, std::string> metadata);
CsvTable lambda_table(const std::vector<LengthScaleEstimate>& estimates, std::map<std::string, std::string> metadata);

/// (nu, m_h) pairs of every successful trial in a min-nodes table.
std::vector<std::pair<double, double>> read_min_nodes_pairs(const CsvTable& table);
RunRecord read_run_record(const CsvTable& table);
PowerLawFit read_fit(const CsvTable& table);

}  // namespace acda
