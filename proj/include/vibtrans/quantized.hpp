// quantized.hpp: donor/acceptor pair coupled to one quantized vibrational mode
//
//   H = delta sz + J sx + omega a^dagger a - (g/2) sz (a + a^dagger)
//
// on C^2 (x) C^{n_max+1}, basis |d,0>..|d,n_max>, |a,0>..|a,n_max>. With a
// coherent state of real amplitude alpha, <a + a^dagger> = 2 alpha, so the
// mean-field limit is the Effective two-site Hamiltonian with detuning
// delta - g alpha.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "vibtrans/qmat.hpp"
#include "vibtrans/twosite.hpp"

namespace vibtrans::quantized {

/// Mode frequency, exciton coupling and Fock cutoff.
struct PhononSpec {
    double omega = 0.0; // rad/ps
    double g = 0.0;     // rad/ps
    int n_max = 10;

    Eigen::Index levels() const { return n_max + 1; }
    bool operator==(const PhononSpec&) const = default;
};

/// Smallest cutoff satisfying n_max >= alpha^2 + 10 alpha + 10.
int coherent_cutoff(double alpha);

/// Cutoff for a displaced thermal state: coherent rule plus the thermal tail
/// length at which the Boltzmann weight drops below 1e-10.
int displaced_thermal_cutoff(double alpha, double nbar);

class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int required_n_max)
        : std::runtime_error(what), required_n_max_(required_n_max) {}
    int required_n_max() const noexcept { return required_n_max_; }

private:
    int required_n_max_;
};

struct Coherent {
    double alpha = 0.0;
    bool operator==(const Coherent&) const = default;
};
struct DisplacedThermal {
    double alpha = 0.0;
    double nbar = 0.0;
    bool operator==(const DisplacedThermal&) const = default;
};
struct Number {
    int n = 0;
    bool operator==(const Number&) const = default;
};
using PhononKind = std::variant<Coherent, DisplacedThermal, Number>;

/// A weighted set of pure states, rho = sum_k w_k |psi_k><psi_k|.
struct Ensemble {
    std::vector<double> weights;
    std::vector<qmat::ComplexVector> states;
};

/// Spectral ensemble of a density matrix; weights below 1e-14 are dropped.
Ensemble ensemble_of(const qmat::DensityMatrix& rho);

/// Product ensemble of a system state and a phonon ensemble.
Ensemble product_ensemble(const Ensemble& system, const Ensemble& phonon);

class PhononState {
public:
    const PhononKind& kind() const noexcept { return kind_; }
    int n_max() const noexcept { return n_max_; }
    const qmat::DensityMatrix& density() const noexcept { return density_; }
    /// Pure-state decomposition used for evolution (exact, not sampled).
    const Ensemble& ensemble() const noexcept { return ensemble_; }
    double mean_number() const;
    /// Norm lost to truncation before renormalisation.
    double truncation_deficit() const noexcept { return deficit_; }

    friend PhononState coherent_state(double alpha, int n_max);
    friend PhononState displaced_thermal_state(double alpha, double nbar, int n_max);
    friend PhononState number_state(int n, int n_max);

private:
    PhononState(PhononKind kind, int n_max, Ensemble ensemble, double deficit);

    PhononKind kind_;
    int n_max_;
    Ensemble ensemble_;
    qmat::DensityMatrix density_;
    double deficit_;
};

/// c_n = e^{-alpha^2/2} alpha^n / sqrt(n!), renormalised; a deficit above
/// 1e-8 throws TruncationError with the required cutoff.
PhononState coherent_state(double alpha, int n_max);

/// D(alpha) rho_th(nbar) D(alpha)^dagger with Boltzmann weights
/// nbar^n / (1 + nbar)^{n+1}.
PhononState displaced_thermal_state(double alpha, double nbar, int n_max);

PhononState number_state(int n, int n_max);

PhononState make_phonon_state(const PhononKind& kind, int n_max);

qmat::ComplexMatrix full_hamiltonian(double delta, double j, const PhononSpec& spec);

/// Unitary evolution of a (possibly mixed) system (x) phonon state. The
/// initial state is carried as a spectral ensemble, so rho(t) = U rho U^dagger
/// is evaluated exactly at O(dim^2) per pure component and time.
class CoupledEvolution {
public:
    CoupledEvolution(std::shared_ptr<const qmat::Propagator> propagator, Eigen::Index system_dim,
                     Eigen::Index phonon_dim, Ensemble initial);

    qmat::DensityMatrix reduced_state(double t) const;
    qmat::DensityMatrix full_state(double t) const;
    /// Population of the two highest Fock levels at time t.
    double edge_population(double t) const;

    Eigen::Index system_dim() const noexcept { return system_dim_; }
    Eigen::Index phonon_dim() const noexcept { return phonon_dim_; }

private:
    std::vector<qmat::ComplexVector> evolved(double t) const;

    std::shared_ptr<const qmat::Propagator> propagator_;
    Eigen::Index system_dim_;
    Eigen::Index phonon_dim_;
    std::vector<double> weights_;
    std::vector<qmat::ComplexVector> coeffs_; // eigenbasis coefficients
};

struct EvolveOptions {
    double leakage_tolerance = 1e-6;
    bool allow_leakage = false; // report instead of throwing
};

struct ReducedEvolution {
    qmat::Trajectory populations;           // columns (p_d, p_a); energies left empty
    std::vector<qmat::DensityMatrix> reduced;
    double max_edge_population = 0.0;
    bool truncation_ok = true;
};

ReducedEvolution evolve_reduced(const qmat::StateVector& sys0, const PhononState& ph0, const qmat::ComplexMatrix& H,
                                std::span<const double> times, const EvolveOptions& options = {});

ReducedEvolution evolve_reduced(const qmat::DensityMatrix& sys0, const PhononState& ph0,
                                std::shared_ptr<const qmat::Propagator> propagator, std::span<const double> times,
                                const EvolveOptions& options = {});

struct DeviationResult {
    double max_deviation = 0.0;
    std::vector<double> times;
    std::vector<double> quantized_acceptor;
    std::vector<double> semiclassical_acceptor;
    double max_edge_population = 0.0;
};

/// max_t |p_a^quantized(t) - p_a^semiclassical(t)| from |d> (x) coherent(alpha)
/// on a uniform grid of `points` samples over [0, horizon].
DeviationResult semiclassical_deviation(const twosite::TwoSiteParams& p, const PhononSpec& spec, double horizon,
                                        std::size_t points = 401);

struct WitnessResult {
    double witness = 0.0;
    std::vector<double> times;
    std::vector<double> distance; // D(t) of the reduced system states
    double max_edge_population = 0.0;
};

/// Largest positive step D(t_{k+1}) - D(t_k) of the reduced-state trace
/// distance, clamped below at 0.
WitnessResult nonmarkov_witness(double delta, double j, const PhononSpec& spec, const qmat::DensityMatrix& rho_a,
                                const qmat::DensityMatrix& rho_b, const PhononState& ph0, std::span<const double> times,
                                const EvolveOptions& options = {});

} // namespace vibtrans::quantized
