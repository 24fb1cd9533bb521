// fmo.hpp: seven-site excitonic model
//
// Site energies and couplings are held in cm^-1 and converted to rad/ps when
// the Hamiltonian is built. Sites are numbered 1..7 in the public API.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vibtrans/qmat.hpp"

namespace vibtrans::fmo {

inline constexpr int kSites = 7;

struct FmoParams {
    std::array<double, kSites> site_energies{};                       // cm^-1
    std::array<std::array<double, kSites>, kSites> couplings{};       // cm^-1, symmetric, zero diagonal
    std::string label;

    /// Symmetry within 1e-12 and a zero diagonal; throws std::invalid_argument.
    void validate() const;
    bool operator==(const FmoParams&) const = default;
};

/// Reads {"label", "site_energies": {"unit", "values"[7]}, "couplings": {"unit", "values"[7][7]}}.
/// `path` prefixes error messages (e.g. "fmo").
FmoParams load_fmo(const nlohmann::json& block, const std::string& path = "fmo");
nlohmann::json to_json(const FmoParams& p);

/// sum_i E_i |i><i| + sum_{i<j} J_ij (|i><j| + |j><i|), in rad/ps.
qmat::ComplexMatrix fmo_hamiltonian(const FmoParams& p);

struct MeanEnergy {
    bool operator==(const MeanEnergy&) const = default;
};
struct SiteEnergy {
    int site = 3;
    bool operator==(const SiteEnergy&) const = default;
};
using ResonanceTarget = std::variant<MeanEnergy, SiteEnergy>;

struct ShiftResult {
    FmoParams params;
    std::array<double, kSites> shifts{}; // s_i = E* - E_i, cm^-1
    double target_energy = 0.0;          // cm^-1
};

/// Moves every site energy onto the common target; couplings are untouched.
ShiftResult apply_resonance_shifts(const FmoParams& p, const ResonanceTarget& target = MeanEnergy{});

namespace init {
struct Uniform {
    bool operator==(const Uniform&) const = default;
};
struct Site {
    int site = 1;
    bool operator==(const Site&) const = default;
};
struct Backprop {
    int site = 3;
    double t_star_fs = 220.0;
    bool operator==(const Backprop&) const = default;
};
struct Explicit {
    std::array<qmat::Complex, kSites> amplitudes{};
    bool operator==(const Explicit&) const = default;
};
} // namespace init

using InitialStateSpec = std::variant<init::Uniform, init::Site, init::Backprop, init::Explicit>;

/// U(t_star)^dagger |site>; H in rad/ps, t_star in fs.
qmat::StateVector backprop_initial_state(const qmat::ComplexMatrix& H7, int site, double t_star_fs);

qmat::StateVector initial_state(const qmat::ComplexMatrix& H7, const InitialStateSpec& spec);

struct Trajectory {
    std::vector<double> times_fs;
    qmat::RealMatrix populations; // rows: times, columns: sites 1..7
    qmat::ComplexMatrix amplitudes; // full state, kept for coherences

    std::size_t size() const noexcept { return times_fs.size(); }
    /// |rho_ij(t_k)| with 1-based sites.
    double coherence(std::size_t k, int i, int j) const;
};

Trajectory simulate_fmo(const qmat::ComplexMatrix& H7, const InitialStateSpec& spec, double t_max_fs = 1000.0,
                        double dt_fs = 1.0);

struct CaptureMetrics {
    double peak_probability = 0.0;
    double peak_time_fs = 0.0;
    int site = 3;
};

/// First global maximum of p_site over the trajectory window.
CaptureMetrics capture_metrics(const Trajectory& traj, int site);

/// Time-averaged occupation of each site over the window.
std::array<double, kSites> mean_populations(const Trajectory& traj);

} // namespace vibtrans::fmo
