#include "vibtrans/estimates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vibtrans::estimates {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite and > 0");
}

} // namespace

double decoherence_ratio(double mass_kg, double coherence_length_m, double temperature_K) {
    require_positive(mass_kg, "mass");
    require_positive(coherence_length_m, "coherence length");
    require_positive(temperature_K, "temperature");
    constexpr double hbar = PhysicalConstants::hbar;
    return hbar * hbar / (mass_kg * coherence_length_m * coherence_length_m * PhysicalConstants::k_B * temperature_K);
}

double absorbed_energy(double flux_W_per_m2, double area_m2, double duration_s) {
    require_positive(flux_W_per_m2, "flux");
    require_positive(area_m2, "area");
    require_positive(duration_s, "duration");
    return flux_W_per_m2 * area_m2 * duration_s;
}

double alpha_from_flux(double flux_W_per_m2, double area_m2, double duration_s, double phonon_energy_J) {
    require_positive(phonon_energy_J, "phonon energy");
    return std::sqrt(absorbed_energy(flux_W_per_m2, area_m2, duration_s) / phonon_energy_J);
}

double wavenumber_to_angular(double wavenumber_cm) {
    if (!std::isfinite(wavenumber_cm)) throw std::invalid_argument("wavenumber must be finite");
    return wavenumber_cm * kWavenumberToAngular;
}

double angular_to_wavenumber(double omega_rad_per_ps) {
    if (!std::isfinite(omega_rad_per_ps)) throw std::invalid_argument("angular frequency must be finite");
    return omega_rad_per_ps / kWavenumberToAngular;
}

} // namespace vibtrans::estimates
