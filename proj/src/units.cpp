#include "vibtrans/units.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "vibtrans/estimates.hpp"

namespace vibtrans::units {

namespace {

struct UnitInfo {
    std::string_view name;
    Dimension dimension;
    double to_base; // energy: rad/ps, time: ps, length: m, area: m^2
};

constexpr double kJouleToRadPerPs = 1e-12 / estimates::PhysicalConstants::hbar;

constexpr std::array kUnits{
    UnitInfo{"rad/ps", Dimension::Energy, 1.0},
    UnitInfo{"cm^-1", Dimension::Energy, estimates::kWavenumberToAngular},
    UnitInfo{"cm-1", Dimension::Energy, estimates::kWavenumberToAngular},
    UnitInfo{"1/cm", Dimension::Energy, estimates::kWavenumberToAngular},
    UnitInfo{"J", Dimension::Energy, kJouleToRadPerPs},
    UnitInfo{"fs", Dimension::Time, 1e-3},
    UnitInfo{"ps", Dimension::Time, 1.0},
    UnitInfo{"ns", Dimension::Time, 1e3},
    UnitInfo{"s", Dimension::Time, 1e12},
    UnitInfo{"m", Dimension::Length, 1.0},
    UnitInfo{"nm", Dimension::Length, 1e-9},
    UnitInfo{"m^2", Dimension::Area, 1.0},
    UnitInfo{"nm^2", Dimension::Area, 1e-18},
    UnitInfo{"kg", Dimension::Mass, 1.0},
    UnitInfo{"K", Dimension::Temperature, 1.0},
    UnitInfo{"W/m^2", Dimension::Irradiance, 1.0},
};

std::optional<UnitInfo> lookup(std::string_view unit) {
    for (const UnitInfo& u : kUnits)
        if (u.name == unit) return u;
    return std::nullopt;
}

UnitInfo require_unit(std::string_view unit) {
    auto u = lookup(unit);
    if (!u) throw std::invalid_argument("unknown unit '" + std::string(unit) + "'");
    return *u;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double convert_at(double value, std::string_view from, std::string_view to, const std::string& path) {
    try {
        return convert(value, from, to);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

double finite_number(const nlohmann::json& node, const std::string& path) {
    if (!node.is_number()) throw ConfigError(path, "expected a number");
    const double v = node.get<double>();
    if (!std::isfinite(v)) throw ConfigError(path, "value must be finite");
    return v;
}

} // namespace

double convert(double value, std::string_view from, std::string_view to) {
    const UnitInfo a = require_unit(from);
    const UnitInfo b = require_unit(to);
    if (a.dimension != b.dimension)
        throw std::invalid_argument("cannot convert '" + std::string(from) + "' to '" + std::string(to) + "'");
    if (a.name == b.name || a.to_base == b.to_base) return value;
    return value * a.to_base / b.to_base;
}

Dimension dimension_of(std::string_view unit) {
    return require_unit(unit).dimension;
}

bool is_known_unit(std::string_view unit) {
    return lookup(unit).has_value();
}

double quantity(const nlohmann::json& node, const std::string& path, std::string_view target) {
    if (node.is_number())
        throw ConfigError(path, "dimensioned quantity requires an explicit unit, e.g. \"" + format_double(node.get<double>()) +
                                    " " + std::string(target) + "\"");
    if (node.is_string()) {
        const std::string text = node.get<std::string>();
        const char* begin = text.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ConfigError(path, "cannot parse quantity '" + text + "'");
        const std::string_view unit = trim(std::string_view(end));
        if (unit.empty()) throw ConfigError(path, "dimensioned quantity requires an explicit unit");
        if (!std::isfinite(v)) throw ConfigError(path, "value must be finite");
        return convert_at(v, unit, target, path);
    }
    if (node.is_object()) {
        for (const auto& [key, _] : node.items())
            if (key != "value" && key != "unit") throw ConfigError(path + "." + key, "unknown key");
        if (!node.contains("unit")) throw ConfigError(path, "dimensioned quantity requires an explicit unit");
        if (!node.contains("value")) throw ConfigError(path, "missing required field 'value'");
        if (!node["unit"].is_string()) throw ConfigError(path + ".unit", "expected a string");
        return convert_at(finite_number(node["value"], path + ".value"), node["unit"].get<std::string>(), target, path);
    }
    throw ConfigError(path, "expected a quantity such as \"1 " + std::string(target) + "\"");
}

std::vector<double> quantity_array(const nlohmann::json& node, const std::string& path, std::string_view target,
                                   std::size_t expected) {
    if (node.is_array()) throw ConfigError(path, "dimensioned array requires {\"unit\": ..., \"values\": [...]}");
    if (!node.is_object()) throw ConfigError(path, "expected {\"unit\": ..., \"values\": [...]}");
    for (const auto& [key, _] : node.items())
        if (key != "values" && key != "unit") throw ConfigError(path + "." + key, "unknown key");
    if (!node.contains("unit")) throw ConfigError(path, "dimensioned array requires an explicit unit");
    if (!node["unit"].is_string()) throw ConfigError(path + ".unit", "expected a string");
    if (!node.contains("values")) throw ConfigError(path, "missing required field 'values'");
    const auto& values = node["values"];
    if (!values.is_array() || values.empty()) throw ConfigError(path + ".values", "expected a non-empty array");
    if (expected != 0 && values.size() != expected)
        throw ConfigError(path + ".values",
                          "expected " + std::to_string(expected) + " entries, got " + std::to_string(values.size()));
    const std::string unit = node["unit"].get<std::string>();
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        const std::string p = path + ".values[" + std::to_string(k) + "]";
        out.push_back(convert_at(finite_number(values[k], p), unit, target, p));
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json quantity_json(double value, std::string_view unit) {
    return format_double(value) + " " + std::string(unit);
}

nlohmann::json quantity_array_json(const std::vector<double>& values, std::string_view unit) {
    return nlohmann::json{{"unit", std::string(unit)}, {"values", values}};
}

} // namespace vibtrans::units
