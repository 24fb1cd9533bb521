#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "vibtrans/config.hpp"

using namespace vibtrans;
using namespace vibtrans::config;
using nlohmann::json;

namespace {

const char* kMinimalTwoSite = R"({"twosite": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10}})";

std::string error_path(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<accepted>";
}

json fmo_inline() {
    return json::parse(R"({
      "fmo": {
        "label": "test",
        "site_energies": {"unit": "cm^-1", "values": [12410, 12530, 12210, 12320, 12480, 12630, 12440]},
        "couplings": {"unit": "cm^-1", "values": [
          [0, -87.7, 5.5, -5.9, 6.7, -13.7, -9.9],
          [-87.7, 0, 30.8, 8.2, 0.7, 11.8, 4.3],
          [5.5, 30.8, 0, -53.5, -2.2, -9.6, 6.0],
          [-5.9, 8.2, -53.5, 0, -70.7, -17.0, -63.3],
          [6.7, 0.7, -2.2, -70.7, 0, 81.1, -1.3],
          [-13.7, 11.8, -9.6, -17.0, 81.1, 0, 39.7],
          [-9.9, 4.3, 6.0, -63.3, -1.3, 39.7, 0]]},
        "initial": {"kind": "backprop", "site": 3, "t_star": "0.22 ps"}
      },
      "time_grid": {"t_max": "1 ps", "dt": "0.5 fs"}
    })");
}

} // namespace

TEST(Config, MinimalTwoSiteMaterialisesDefaults) {
    const RunConfig cfg = parse_config(kMinimalTwoSite);
    ASSERT_EQ(cfg.model, Model::TwoSite);
    const auto& p = std::get<TwoSiteBlock>(cfg.block).params;
    EXPECT_EQ(p.omega, 0.0);
    EXPECT_EQ(p.convention, twosite::Convention::Effective);
    const json echo = to_json(cfg);
    EXPECT_EQ(echo["twosite"]["convention"], "effective");
    EXPECT_TRUE(echo["twosite"].contains("omega"));
    EXPECT_TRUE(echo.contains("time_grid"));
    EXPECT_EQ(echo["output"]["format"], "csv");
    EXPECT_EQ(echo["output"]["path"], "vibtrans_twosite.csv");
}

TEST(Config, RejectsUnknownKeysWithPath) {
    EXPECT_EQ(error_path(R"({"twosite": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10, "beta": 1}})"),
              "twosite.beta");
    EXPECT_EQ(error_path(R"({"twosite": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10}, "colour": 1})"),
              "colour");
    EXPECT_EQ(error_path(R"({"estimate": {"mass": "1e-21 kg", "speed": "1 m"}})"), "estimate.speed");
}

TEST(Config, RejectsMissingFieldsWithPath) {
    EXPECT_EQ(error_path(R"({"twosite": {"delta": "2 rad/ps", "g": "0.2 rad/ps", "alpha": 10}})"), "twosite.j");
    EXPECT_EQ(error_path(R"({"sweep": {"axis": "detuning_error", "grid": {"unit": "rad/ps", "values": [0]}}})"),
              "sweep.base");
}

TEST(Config, RejectsBareNumbersOnDimensionedFields) {
    EXPECT_EQ(error_path(R"({"twosite": {"delta": 2, "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10}})"), "twosite.delta");
    EXPECT_EQ(error_path(std::string(R"({"twosite": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10},)") +
                         R"("time_grid": {"t_max": 1000, "dt": "1 fs"}})"),
              "time_grid.t_max");
    EXPECT_EQ(error_path(R"({"twosite": {"delta": "2 fs", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10}})"), "twosite.delta");
}

TEST(Config, UnitsAreConverted) {
    const RunConfig cfg = parse_config(
        R"({"twosite": {"delta": "10 cm^-1", "j": "1 rad/ps", "g": "0 rad/ps", "alpha": 0}, "time_grid": {"t_max": "2 ps", "dt": "0.5 fs"}})");
    EXPECT_NEAR(std::get<TwoSiteBlock>(cfg.block).params.delta, 1.88365156730885, 1e-13);
    EXPECT_DOUBLE_EQ(cfg.time_grid->t_max_fs, 2000.0);
    EXPECT_DOUBLE_EQ(cfg.time_grid->dt_fs, 0.5);
}

TEST(Config, ExactlyOneModelBlock) {
    EXPECT_EQ(error_path("{}"), "");
    EXPECT_EQ(error_path(R"({"twosite": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10}, "estimate": {}})"),
              "estimate");
    EXPECT_EQ(error_path(R"({"model": "fmo", "estimate": {}})"), "model");
    EXPECT_NO_THROW(parse_config(R"({"model": "estimate", "estimate": {}})"));
}

TEST(Config, TimeGridValidation) {
    const std::string base = R"({"twosite": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10}, )";
    EXPECT_EQ(error_path(base + R"("time_grid": {"t_max": "10 fs", "dt": "0 fs"}})"), "time_grid.dt");
    EXPECT_EQ(error_path(base + R"("time_grid": {"t_max": "-10 fs", "dt": "1 fs"}})"), "time_grid.t_max");
    EXPECT_EQ(error_path(R"({"estimate": {}, "time_grid": {"t_max": "1 ps", "dt": "1 fs"}})"), "time_grid");
}

TEST(Config, ShortCouplingMatrixNamesSection) {
    json doc = fmo_inline();
    doc["fmo"]["couplings"]["values"].erase(6);
    try {
        parse_config_json(doc);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.path(), "fmo.couplings.values");
        EXPECT_NE(std::string(e.what()).find("7 rows"), std::string::npos);
    }
}

TEST(Config, FmoRoundTripInline) {
    const RunConfig cfg = parse_config_json(fmo_inline());
    const RunConfig again = parse_config(serialize_config(cfg));
    EXPECT_EQ(cfg, again);
    EXPECT_EQ(serialize_config(cfg), serialize_config(again));
    const auto& b = std::get<FmoBlock>(cfg.block);
    EXPECT_DOUBLE_EQ(std::get<fmo::init::Backprop>(b.initial).t_star_fs, 220.0);
    EXPECT_TRUE(b.resonance.has_value());
}

TEST(Config, FmoDefaultsToShippedDataFile) {
    const RunConfig cfg = parse_config(R"({"fmo": {}})");
    const auto& b = std::get<FmoBlock>(cfg.block);
    EXPECT_DOUBLE_EQ(b.params.site_energies[0], 12410.0);
    EXPECT_TRUE(std::holds_alternative<fmo::init::Backprop>(b.initial));
    EXPECT_EQ(b.capture_site, 3);
    EXPECT_DOUBLE_EQ(cfg.time_grid->t_max_fs, 1000.0);
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
}

TEST(Config, FmoResonanceAndInitialVariants) {
    EXPECT_FALSE(std::get<FmoBlock>(parse_config(R"({"fmo": {"resonance": "none"}})").block).resonance);
    const RunConfig site = parse_config(R"({"fmo": {"resonance": "site:3", "initial": {"kind": "site", "site": 2}}})");
    EXPECT_EQ(std::get<fmo::SiteEnergy>(*std::get<FmoBlock>(site.block).resonance).site, 3);
    EXPECT_EQ(error_path(R"({"fmo": {"resonance": "site:9"}})"), "fmo.resonance");
    EXPECT_EQ(error_path(R"({"fmo": {"initial": {"kind": "site", "site": 0}}})"), "fmo.initial.site");
    EXPECT_EQ(error_path(R"({"fmo": {"initial": {"kind": "explicit", "amplitudes": [[1, 0]]}}})"), "fmo.initial.amplitudes");
    EXPECT_EQ(error_path(R"({"fmo": {"hamiltonian_file": "missing.json"}})"), "fmo.hamiltonian_file");
    const RunConfig ex = parse_config(
        R"({"fmo": {"initial": {"kind": "explicit", "amplitudes": [[0.6, 0], [0, 0.8], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]]}}})");
    EXPECT_EQ(parse_config(serialize_config(ex)), ex);
}

TEST(Config, QuantizedDefaultsUseCutoffRule) {
    const RunConfig cfg = parse_config(
        R"({"quantized": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "omega": "0.01 rad/ps", "phonon": {"alpha": 10}}})");
    const auto& b = std::get<QuantizedBlock>(cfg.block);
    EXPECT_EQ(b.phonon.n_max, 210);
    EXPECT_EQ(b.system, SystemPreset::Donor);
    EXPECT_EQ(b.analysis, QuantizedAnalysis::Trajectory);
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
    EXPECT_EQ(error_path(R"({"quantized": {"delta": "0 rad/ps", "j": "1 rad/ps", "g": "0 rad/ps", "omega": "1 rad/ps",
                          "phonon": {"state": "number", "n": 2, "alpha": 1}}})"),
              "quantized.phonon.alpha");
    EXPECT_EQ(error_path(R"({"quantized": {"delta": "0 rad/ps", "j": "1 rad/ps", "g": "0 rad/ps", "omega": "1 rad/ps",
                          "phonon": {"state": "number", "n": 2}, "analysis": "deviation"}})"),
              "quantized.phonon.state");
}

TEST(Config, SweepValidation) {
    const std::string base = R"("base": {"delta": "2 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10})";
    EXPECT_EQ(error_path(R"({"sweep": {)" + base + R"(, "axis": "alpha_spread", "grid": [0, 1]}})"), "seed");
    EXPECT_NO_THROW(parse_config(R"({"seed": 3, "sweep": {)" + base + R"(, "axis": "alpha_spread", "grid": [0, 1]}})"));
    EXPECT_EQ(error_path(R"({"sweep": {)" + base + R"(, "axis": "detuning_error", "grid": [0, 1]}})"), "sweep.grid");
    EXPECT_EQ(error_path(R"({"sweep": {)" + base + R"(, "axis": "wobble", "grid": [0]}})"), "sweep.axis");
    EXPECT_EQ(error_path(R"({"sweep": {)" + base + R"(, "axis": "coupling_asymmetry", "grid": [0.2, 0.1]}})"), "sweep");
    EXPECT_EQ(error_path(R"({"sweep": {"base": {"delta": "3 rad/ps", "j": "1 rad/ps", "g": "0.2 rad/ps", "alpha": 10},
                          "axis": "coupling_asymmetry", "grid": [0]}})"),
              "sweep.base");
    EXPECT_EQ(error_path(R"({"seed": -1, "estimate": {}})"), "seed");
}

TEST(Config, EstimateDefaults) {
    const RunConfig cfg = parse_config(R"({"estimate": {}})");
    const auto& e = std::get<EstimateBlock>(cfg.block);
    EXPECT_EQ(e.area_m2, 1e-18);
    EXPECT_EQ(e.phonon_energy_J, 1e-32);
    EXPECT_FALSE(cfg.time_grid);
    EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
    EXPECT_EQ(error_path(R"({"estimate": {"temperature": "-3 K"}})"), "estimate.temperature");
}

TEST(Config, HashIgnoresOutputButTracksPhysics) {
    RunConfig a = parse_config(kMinimalTwoSite);
    RunConfig b = a;
    b.output.path = "elsewhere.json";
    b.output.format = OutputFormat::Json;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.seed = 5;
    EXPECT_NE(config_hash(a), config_hash(b));
    std::get<TwoSiteBlock>(b.block).params.j = 1.5;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, InvalidJsonIsReported) {
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
}

TEST(Config, ShippedConfigsRoundTrip) {
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(VIBTRANS_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        const RunConfig cfg = load_config_file(entry.path());
        EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << entry.path();
        ++seen;
    }
    EXPECT_GE(seen, 10u);
}
