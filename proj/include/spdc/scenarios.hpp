#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "spdc/config.hpp"
#include "spdc/io.hpp"

namespace spdc {

struct ScenarioResult {
    /// file stem -> table, in output order
    std::vector<std::pair<std::string, io::Table>> tables;
    json summary = json::object();
    std::vector<std::string> warnings;

    const io::Table& table(const std::string& name) const;
};

using Progress = std::function<void(const std::string&)>;

/// Pure function of the resolved config (scenario, parameters, seed). Grid point k of a
/// scan draws from substream({seed, 0}, k); threads never change the result.
ScenarioResult run_scenario(const RunConfig& cfg, const Progress& progress = {});

/// Writes <stem>.csv for every table, summary.json and metadata.json (resolved config,
/// version, file list, warnings) into dir, replacing a previous run atomically.
void write_outputs(const ScenarioResult& r, const RunConfig& cfg, const std::filesystem::path& dir);

/// Column values of a table as doubles (integers converted); throws on text columns.
std::vector<double> column(const io::Table& t, const std::string& name);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
/// Ordinary least squares y = slope x + intercept.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

} // namespace spdc
