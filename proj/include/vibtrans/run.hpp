// run.hpp: dispatch a RunConfig to its model and emit plot data

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vibtrans/config.hpp"

namespace vibtrans::run {

/// Column-major numeric table; every column has the same length.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;

    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
};

struct RunReport {
    nlohmann::ordered_json resolved_config; // every default materialised
    nlohmann::ordered_json metrics;
    Table table;
    std::string config_hash;
    double wall_seconds = 0.0; // never written to output files
};

struct RunOptions {
    unsigned threads = 1;
};

RunReport run(const config::RunConfig& cfg, const RunOptions& options = {});

/// First line of every emitted file.
std::string header_line(const std::string& config_hash);

std::string render_csv(const RunReport& report);
std::string render_json(const RunReport& report);
void write_output(const RunReport& report, const config::OutputSpec& output);

/// Invariants of the unitary dynamics behind a config, sampled on its grid.
struct ConservationMetrics {
    double population_sum_defect = 0.0; // max |sum_i p_i - 1|
    double unitarity_defect = 0.0;      // max |U^dagger U - I|
    double energy_drift = 0.0;          // max |<H>(t) - <H>(0)| / max(|<H>(0)|, ||H||)
    double trace_distance_drift = 0.0;  // max |D(rho1(t), rho2(t)) - D(rho1(0), rho2(0))|
    std::size_t samples = 0;
};

/// nullopt for models without a Hamiltonian time evolution (estimate).
std::optional<ConservationMetrics> conservation_metrics(const config::RunConfig& cfg, std::size_t max_samples = 64);

} // namespace vibtrans::run
