#include "vibtrans/errorbudget.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vibtrans::errorbudget {

namespace {

// Static block partition; each index writes only its own slot, so the
// result is independent of the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t lo = n * w / workers;
            const std::size_t hi = n * (w + 1) / workers;
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void require_resonant(const twosite::TwoSiteParams& base) {
    base.validate();
    const double residual = base.effective_detuning();
    if (std::abs(residual) > 1e-9 * std::max(1.0, std::abs(base.delta))) {
        std::ostringstream os;
        os << "sweep base must be at resonance (delta = g alpha); residual detuning is " << residual << " rad/ps";
        throw std::invalid_argument(os.str());
    }
}

/// Same base with the effective detuning replaced by delta_eff (alpha kept).
twosite::TwoSiteParams with_detuning(const twosite::TwoSiteParams& base, double delta_eff) {
    twosite::TwoSiteParams p = base;
    p.delta = base.g * base.alpha + delta_eff;
    return p;
}

EfficiencyCurve deterministic_curve(const SweepSpec& spec, const Execution& exec,
                                    const std::function<double(double)>& efficiency) {
    EfficiencyCurve c;
    c.axis_values = spec.grid;
    c.mean_efficiency.assign(spec.grid.size(), 0.0);
    c.standard_error.assign(spec.grid.size(), 0.0);
    parallel_for(spec.grid.size(), exec.threads,
                 [&](std::size_t m) { c.mean_efficiency[m] = std::clamp(efficiency(spec.grid[m]), 0.0, 1.0); });
    return c;
}

void require_axis(const SweepSpec& spec, Axis axis) {
    spec.validate();
    if (spec.axis != axis)
        throw std::invalid_argument("sweep spec axis is " + std::string(axis_name(spec.axis)) + ", expected " +
                                    std::string(axis_name(axis)));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {
    // (0, 1]
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

} // namespace

std::string_view axis_name(Axis axis) {
    switch (axis) {
    case Axis::DetuningError: return "detuning_error";
    case Axis::CouplingAsymmetry: return "coupling_asymmetry";
    case Axis::AlphaSpread: return "alpha_spread";
    case Axis::DriveFrequency: return "drive_frequency";
    }
    return "unknown";
}

Axis axis_from_name(std::string_view name) {
    for (Axis a : {Axis::DetuningError, Axis::CouplingAsymmetry, Axis::AlphaSpread, Axis::DriveFrequency})
        if (axis_name(a) == name) return a;
    throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

void SweepSpec::validate() const {
    base.validate();
    if (grid.empty()) throw std::invalid_argument("sweep grid must not be empty");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!std::isfinite(grid[k])) throw std::invalid_argument("sweep grid values must be finite");
        if (k > 0 && !(grid[k] > grid[k - 1])) throw std::invalid_argument("sweep grid must be strictly ascending");
    }
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (axis == Axis::AlphaSpread && !seed) throw std::invalid_argument("alpha_spread sweeps require a seed");
}

double asymmetric_effective_coupling(double g, double eps) {
    // g_d = g, g_a = -g (1 + eps): (g_d - g_a) / 2
    return g * (1.0 + 0.5 * eps);
}

double standard_normal(std::uint64_t seed, std::uint64_t grid_index, std::uint64_t sample_index) {
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ (grid_index * 0xD1B54A32D192ED03ULL));
    key = splitmix64(key ^ (sample_index * 0xABC98388FB8FAC03ULL));
    const double u1 = unit_open(splitmix64(key));
    const double u2 = unit_open(splitmix64(key + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

EfficiencyCurve sweep_residual_detuning(const SweepSpec& spec, const Execution& exec) {
    require_axis(spec, Axis::DetuningError);
    require_resonant(spec.base);
    return deterministic_curve(spec, exec, [&](double delta) {
        return twosite::peak_transfer(with_detuning(spec.base, delta)).probability;
    });
}

EfficiencyCurve sweep_coupling_asymmetry(const SweepSpec& spec, const Execution& exec) {
    require_axis(spec, Axis::CouplingAsymmetry);
    require_resonant(spec.base);
    return deterministic_curve(spec, exec, [&](double eps) {
        twosite::TwoSiteParams p = spec.base;
        p.g = asymmetric_effective_coupling(spec.base.g, eps);
        return twosite::peak_transfer(p).probability;
    });
}

EfficiencyCurve sample_alpha_spread(const SweepSpec& spec, const Execution& exec) {
    require_axis(spec, Axis::AlphaSpread);
    require_resonant(spec.base);
    for (double sigma : spec.grid)
        if (sigma < 0.0) throw std::invalid_argument("alpha spread must be >= 0");

    const std::size_t per_point = static_cast<std::size_t>(spec.samples);
    const std::size_t total = spec.grid.size() * per_point;
    std::vector<double> eff(total);
    const std::uint64_t seed = *spec.seed;
    parallel_for(total, exec.threads, [&](std::size_t idx) {
        const std::size_t m = idx / per_point;
        const std::size_t k = idx % per_point;
        const double dalpha = spec.grid[m] * standard_normal(seed, m, k);
        // alpha = alpha_res + dalpha, expressed through the detuning so that
        // draws below zero stay representable
        eff[idx] = std::clamp(twosite::peak_transfer(with_detuning(spec.base, -spec.base.g * dalpha)).probability, 0.0, 1.0);
    });

    EfficiencyCurve c;
    c.axis_values = spec.grid;
    for (std::size_t m = 0; m < spec.grid.size(); ++m) {
        double sum = 0.0;
        for (std::size_t k = 0; k < per_point; ++k) sum += eff[m * per_point + k];
        const double mean = sum / static_cast<double>(per_point);
        double ss = 0.0;
        for (std::size_t k = 0; k < per_point; ++k) {
            const double d = eff[m * per_point + k] - mean;
            ss += d * d;
        }
        const double se = per_point > 1 ? std::sqrt(ss / static_cast<double>(per_point - 1) / static_cast<double>(per_point)) : 0.0;
        c.mean_efficiency.push_back(mean);
        c.standard_error.push_back(se);
    }
    return c;
}

twosite::PeakTransfer drive_peak(const twosite::TwoSiteParams& p, const DriveOptions& options) {
    p.validate();
    const double h = p.hopping();
    const double shift = p.g * p.alpha;
    double step = (p.omega > 0.0) ? std::min(0.01 / p.j, 0.01 / p.omega) : 0.01 / p.j;

    auto run = [&](double dt) -> twosite::PeakTransfer {
        qmat::Complex cd = 1.0, ca = 0.0;
        double y0 = 0.0, y1 = 0.0;
        for (long k = 0; k < options.max_steps; ++k) {
            const double t_mid = (static_cast<double>(k) + 0.5) * dt;
            const double d = p.delta - shift * std::cos(p.omega * t_mid);
            const double r = std::hypot(d, h);
            const double c = std::cos(r * dt);
            const double s = std::sin(r * dt) / r;
            // exp(-i (d sz + h sx) dt) = c I - i s (d sz + h sx)
            const qmat::Complex nd = c * cd - qmat::Complex(0, s) * (d * cd + h * ca);
            const qmat::Complex na = c * ca - qmat::Complex(0, s) * (h * cd - d * ca);
            cd = nd;
            ca = na;
            const double y2 = std::norm(ca);
            if (k >= 1 && y2 < y1 && y1 >= y0) {
                const double curv = y0 - 2.0 * y1 + y2;
                double peak = y1;
                double offset = 0.0;
                if (curv < 0.0) {
                    offset = 0.5 * (y0 - y2) / curv;
                    peak = y1 - 0.125 * (y0 - y2) * (y0 - y2) / curv;
                }
                return {std::clamp(peak, 0.0, 1.0), (static_cast<double>(k) + offset) * dt};
            }
            y0 = y1;
            y1 = y2;
        }
        std::ostringstream os;
        os << "drive integration step " << dt << " ps needs more than " << options.max_steps
           << " steps to reach the first transfer peak";
        throw StepUnderflowError(os.str());
    };

    if (!(step > 0.0) || !std::isfinite(step)) throw StepUnderflowError("drive integration step underflows");
    twosite::PeakTransfer prev = run(step);
    for (int level = 0; level < 40; ++level) {
        step *= 0.5;
        const twosite::PeakTransfer next = run(step);
        if (std::abs(next.probability - prev.probability) < options.refine_tolerance) return next;
        prev = next;
    }
    throw StepUnderflowError("drive integration did not converge under step refinement");
}

EfficiencyCurve sweep_drive_frequency(const SweepSpec& spec, const Execution& exec) {
    require_axis(spec, Axis::DriveFrequency);
    require_resonant(spec.base);
    for (double w : spec.grid)
        if (w < 0.0) throw std::invalid_argument("drive frequency must be >= 0");
    return deterministic_curve(spec, exec, [&](double omega) {
        twosite::TwoSiteParams p = spec.base;
        p.omega = omega;
        return drive_peak(p).probability;
    });
}

EfficiencyCurve run_sweep(const SweepSpec& spec, const Execution& exec) {
    switch (spec.axis) {
    case Axis::DetuningError: return sweep_residual_detuning(spec, exec);
    case Axis::CouplingAsymmetry: return sweep_coupling_asymmetry(spec, exec);
    case Axis::AlphaSpread: return sample_alpha_spread(spec, exec);
    case Axis::DriveFrequency: return sweep_drive_frequency(spec, exec);
    }
    throw std::invalid_argument("unknown sweep axis");
}

} // namespace vibtrans::errorbudget
