#include <gtest/gtest.h>

#include <cmath>

#include "vibtrans/estimates.hpp"

using namespace vibtrans::estimates;

TEST(Estimates, DecoherenceRatioForMolecularMass) {
    const double r = decoherence_ratio(2e-21, 2e-9, 300.0);
    const double hbar = 1.054571817e-34, kB = 1.380649e-23;
    EXPECT_NEAR(r, hbar * hbar / (2e-21 * 4e-18 * kB * 300.0), 1e-24);
    EXPECT_GE(r, 1e-10);
    EXPECT_LE(r, 1e-9);
}

TEST(Estimates, DecoherenceRatioScaling) {
    const double base = decoherence_ratio(2e-21, 2e-9, 300.0);
    EXPECT_NEAR(decoherence_ratio(4e-21, 2e-9, 300.0), base / 2.0, base * 1e-14);
    EXPECT_NEAR(decoherence_ratio(2e-21, 4e-9, 300.0), base / 4.0, base * 1e-14);
    EXPECT_NEAR(decoherence_ratio(2e-21, 2e-9, 150.0), base * 2.0, base * 1e-14);
}

TEST(Estimates, FluxEnergyAndAlpha) {
    EXPECT_NEAR(absorbed_energy(100.0, 1e-18, 1e-12), 1e-28, 1e-40);
    EXPECT_NEAR(alpha_from_flux(100.0, 1e-18, 1e-12, 1e-32), 100.0, 1e-10);
    EXPECT_NEAR(alpha_from_flux(100.0, 4e-18, 1e-12, 1e-32), 200.0, 1e-10);
}

TEST(Estimates, RejectNonPositiveInputs) {
    EXPECT_THROW(decoherence_ratio(0.0, 1e-9, 300.0), std::invalid_argument);
    EXPECT_THROW(decoherence_ratio(1e-21, -1e-9, 300.0), std::invalid_argument);
    EXPECT_THROW(decoherence_ratio(1e-21, 1e-9, 0.0), std::invalid_argument);
    EXPECT_THROW(absorbed_energy(100.0, 0.0, 1e-12), std::invalid_argument);
    EXPECT_THROW(alpha_from_flux(100.0, 1e-18, 1e-12, 0.0), std::invalid_argument);
    EXPECT_THROW(alpha_from_flux(100.0, 1e-18, INFINITY, 1e-32), std::invalid_argument);
}

TEST(Estimates, WavenumberConversion) {
    EXPECT_NEAR(wavenumber_to_angular(1.0), 0.188365156730885, 1e-15);
    EXPECT_NEAR(angular_to_wavenumber(wavenumber_to_angular(12410.0)), 12410.0, 1e-10);
    EXPECT_THROW(wavenumber_to_angular(NAN), std::invalid_argument);
}
