// units.hpp: unit-tagged quantities in configuration files
//
// A dimensioned scalar is written "12410 cm^-1" or {"value": 12410, "unit": "cm^-1"};
// a dimensioned array is {"unit": "cm^-1", "values": [...]}. Bare numbers on
// dimensioned fields are rejected.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vibtrans::units {

enum class Dimension { Energy, Time, Length, Area, Mass, Temperature, Irradiance };

/// A configuration problem tied to a key path such as "fmo.couplings[2]".
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& path, const std::string& message)
        : std::invalid_argument(path.empty() ? message : path + ": " + message), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Converts between units of the same dimension; throws std::invalid_argument
/// for unknown units or mismatched dimensions.
double convert(double value, std::string_view from, std::string_view to);

Dimension dimension_of(std::string_view unit);
bool is_known_unit(std::string_view unit);

/// Reads a dimensioned scalar and returns it expressed in `target`.
double quantity(const nlohmann::json& node, const std::string& path, std::string_view target);

/// Reads a dimensioned array; `expected` = 0 accepts any non-empty length.
std::vector<double> quantity_array(const nlohmann::json& node, const std::string& path, std::string_view target,
                                   std::size_t expected = 0);

/// Shortest round-trip representation ("%.17g").
std::string format_double(double v);

nlohmann::json quantity_json(double value, std::string_view unit);
nlohmann::json quantity_array_json(const std::vector<double>& values, std::string_view unit);

} // namespace vibtrans::units
