// config.hpp: run configuration: parsing, validation, canonical serialisation
//
// Configuration files are JSON objects holding exactly one model block
// (twosite, quantized, fmo, sweep, estimate) plus optional time_grid, output
// and seed entries. Dimensioned values carry explicit units; see README.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "vibtrans/errorbudget.hpp"
#include "vibtrans/fmo.hpp"
#include "vibtrans/quantized.hpp"
#include "vibtrans/twosite.hpp"
#include "vibtrans/units.hpp"

namespace vibtrans::config {

using units::ConfigError;

enum class Model { TwoSite, Quantized, Fmo, Sweep, Estimate };
enum class OutputFormat { Csv, Json };

std::string_view model_name(Model m);
std::optional<Model> model_from_name(std::string_view name);

struct TimeGrid {
    double t_max_fs = 0.0;
    double dt_fs = 0.0;
    bool operator==(const TimeGrid&) const = default;
};

struct TwoSiteBlock {
    twosite::TwoSiteParams params;
    bool operator==(const TwoSiteBlock&) const = default;
};

enum class QuantizedAnalysis { Trajectory, Deviation, Witness };
enum class SystemPreset { Donor, Acceptor, Plus, Minus };

struct QuantizedBlock {
    double delta = 0.0; // rad/ps
    double j = 1.0;     // rad/ps
    quantized::PhononSpec phonon;
    quantized::PhononKind phonon_state = quantized::Coherent{0.0};
    SystemPreset system = SystemPreset::Donor;
    QuantizedAnalysis analysis = QuantizedAnalysis::Trajectory;
    SystemPreset witness_a = SystemPreset::Plus;
    SystemPreset witness_b = SystemPreset::Minus;
    bool operator==(const QuantizedBlock&) const = default;
};

struct FmoBlock {
    fmo::FmoParams params;                         // as loaded, before shifting
    std::optional<fmo::ResonanceTarget> resonance; // nullopt: no shift
    fmo::InitialStateSpec initial = fmo::init::Backprop{};
    int capture_site = 3;
    bool coherences = false;
    bool operator==(const FmoBlock&) const = default;
};

struct SweepBlock {
    errorbudget::SweepSpec spec;
    bool operator==(const SweepBlock&) const = default;
};

struct EstimateBlock {
    double mass_kg = 2e-21;
    double coherence_length_m = 2e-9;
    double temperature_K = 300.0;
    double flux_W_per_m2 = 100.0;
    double area_m2 = 1e-18;
    double duration_s = 1e-12;
    double phonon_energy_J = 1e-32;
    double wavenumber_cm = 1.0;
    bool operator==(const EstimateBlock&) const = default;
};

struct OutputSpec {
    std::string path;
    OutputFormat format = OutputFormat::Csv;
    bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
    Model model = Model::TwoSite;
    std::variant<TwoSiteBlock, QuantizedBlock, FmoBlock, SweepBlock, EstimateBlock> block;
    std::optional<TimeGrid> time_grid; // present for trajectory models
    OutputSpec output;
    std::optional<std::uint64_t> seed;

    bool operator==(const RunConfig&) const = default;
};

struct ParseOptions {
    /// Directory against which relative hamiltonian_file paths resolve.
    std::filesystem::path base_dir = ".";
};

RunConfig parse_config(std::string_view text, const ParseOptions& options = {});
RunConfig parse_config_json(const nlohmann::json& doc, const ParseOptions& options = {});
RunConfig load_config_file(const std::filesystem::path& path);

/// Canonical form with every default materialised; parse_config of the
/// result reproduces the same RunConfig.
nlohmann::json to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a 64 of the canonical form without the output section, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Default FMO parameter file shipped with the sources.
std::filesystem::path default_fmo_data_file();

} // namespace vibtrans::config
