// twosite.hpp: semiclassical donor/acceptor model
//
// The single excitation lives in span{|d>, |a>}; |d> is index 0. A static
// coherent phonon field of amplitude alpha shifts the detuning by g*alpha.

#pragma once

#include <span>
#include <vector>

#include "vibtrans/qmat.hpp"

namespace vibtrans::twosite {

/// Which hopping element the 2x2 Hamiltonian carries.
///   Effective:      [[D - g a, J], [J, -(D - g a)]]   (peak J^2 / (J^2 + D_eff^2))
///   DoubledHopping: [[D - g a, 2J], [2J, -(D - g a)]] (exchange term of the two-qubit form)
enum class Convention { Effective, DoubledHopping };

struct TwoSiteParams {
    double delta = 0.0; // rad/ps
    double j = 1.0;     // rad/ps
    double g = 0.0;     // rad/ps
    double alpha = 0.0; // real, non-negative
    double omega = 0.0; // rad/ps
    Convention convention = Convention::Effective;

    /// delta - g * alpha
    double effective_detuning() const { return delta - g * alpha; }
    /// Off-diagonal element of the Hamiltonian under the chosen convention.
    double hopping() const { return convention == Convention::Effective ? j : 2.0 * j; }
    void validate() const;

    bool operator==(const TwoSiteParams&) const = default;
};

/// J^2 / (J^2 + delta_eff^2); rejects j = delta_eff = 0.
double transfer_probability(double j, double delta_eff);

qmat::ComplexMatrix semiclassical_hamiltonian(const TwoSiteParams& p);

/// alpha that zeroes the effective detuning, delta / g.
double resonance_alpha(double delta, double g);

struct PeakTransfer {
    double probability = 0.0;
    double time = 0.0; // ps
};

/// First maximum of the acceptor population starting from |d>, found
/// numerically from the propagator (grid scan plus Brent refinement).
PeakTransfer peak_transfer(const TwoSiteParams& p);

/// General form: first maximum of |<target|U(t)|psi0>|^2 for any Hermitian H.
PeakTransfer first_population_peak(const qmat::ComplexMatrix& H, const qmat::StateVector& psi0, Eigen::Index target);

/// g alpha omega^2 / J^2, the second-order cost of freezing cos(omega t) at 1.
double residual_detuning(double g, double alpha, double omega, double j);

/// Populations (p_d, p_a) from |d> on the given grid (ps).
qmat::Trajectory trajectory(const TwoSiteParams& p, std::span<const double> times);

} // namespace vibtrans::twosite
