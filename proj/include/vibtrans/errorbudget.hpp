// errorbudget.hpp: transfer efficiency under departures from exact resonance
//
// Every sweep starts from a base TwoSiteParams tuned to resonance
// (delta = g alpha) and perturbs one error source along a grid.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "vibtrans/twosite.hpp"

namespace vibtrans::errorbudget {

enum class Axis { DetuningError, CouplingAsymmetry, AlphaSpread, DriveFrequency };

std::string_view axis_name(Axis axis);
Axis axis_from_name(std::string_view name);

struct SweepSpec {
    twosite::TwoSiteParams base;
    Axis axis = Axis::DetuningError;
    std::vector<double> grid; // rad/ps for DetuningError / DriveFrequency, dimensionless otherwise
    int samples = 1;
    std::optional<std::uint64_t> seed;

    void validate() const;
    bool operator==(const SweepSpec&) const = default;
};

struct EfficiencyCurve {
    std::vector<double> axis_values;
    std::vector<double> mean_efficiency;
    std::vector<double> standard_error;
};

/// Worker threads for grid points and samples. Results never depend on it.
struct Execution {
    unsigned threads = 1;
};

/// Efficiency at effective detuning delta for each grid value.
EfficiencyCurve sweep_residual_detuning(const SweepSpec& spec, const Execution& exec = {});

/// g_a = -g_d (1 + eps). The antisymmetric part g (1 + eps/2) shifts the
/// transfer detuning; the symmetric part -g eps/2 multiplies the identity on
/// the single-excitation subspace and only adds a global phase.
EfficiencyCurve sweep_coupling_asymmetry(const SweepSpec& spec, const Execution& exec = {});

/// alpha ~ Normal(alpha_res, sigma) per sample; mean and standard error of
/// the peak transfer. Sample k of grid point m is a pure function of (seed, m, k).
EfficiencyCurve sample_alpha_spread(const SweepSpec& spec, const Execution& exec = {});

/// Effective detuning delta - g alpha cos(omega t); first-peak acceptor population.
EfficiencyCurve sweep_drive_frequency(const SweepSpec& spec, const Execution& exec = {});

EfficiencyCurve run_sweep(const SweepSpec& spec, const Execution& exec = {});

/// Antisymmetric (transfer-shifting) coupling for asymmetry eps.
double asymmetric_effective_coupling(double g, double eps);

struct DriveOptions {
    double refine_tolerance = 1e-6;
    long max_steps = 20'000'000;
};

class StepUnderflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// First acceptor-population peak under the time-dependent shift
/// g alpha cos(omega t), from |d>. Piecewise-constant exact 2x2 steps
/// (midpoint sampled) starting at min(0.01/J, 0.01/omega), halved until the
/// peak changes by less than refine_tolerance.
twosite::PeakTransfer drive_peak(const twosite::TwoSiteParams& p, const DriveOptions& options = {});

/// Counter-based standard normal draw for (seed, grid index, sample index).
double standard_normal(std::uint64_t seed, std::uint64_t grid_index, std::uint64_t sample_index);

} // namespace vibtrans::errorbudget
