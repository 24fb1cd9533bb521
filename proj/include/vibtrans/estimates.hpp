// estimates.hpp: order-of-magnitude calculators (SI inputs)

#pragma once

namespace vibtrans::estimates {

/// CODATA 2018 exact/recommended values.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;       // J s
    static constexpr double k_B = 1.380649e-23;           // J / K
    static constexpr double c_cm_per_s = 2.99792458e10;   // cm / s
    static constexpr double c_cm_per_ps = 2.99792458e-2;  // cm / ps
};

/// 2 pi c with c in cm/ps: rad/ps per cm^-1.
inline constexpr double kWavenumberToAngular = 2.0 * 3.14159265358979323846 * PhysicalConstants::c_cm_per_ps;

/// hbar^2 / (m x^2 k_B T): decoherence over dissipation time.
double decoherence_ratio(double mass_kg, double coherence_length_m, double temperature_K);

/// flux * area * duration, in J.
double absorbed_energy(double flux_W_per_m2, double area_m2, double duration_s);

/// sqrt(E / phonon_energy) with E = flux * area * duration.
double alpha_from_flux(double flux_W_per_m2, double area_m2, double duration_s, double phonon_energy_J);

double wavenumber_to_angular(double wavenumber_cm);
double angular_to_wavenumber(double omega_rad_per_ps);

} // namespace vibtrans::estimates
