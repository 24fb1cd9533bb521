#include "vibtrans/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "vibtrans/errorbudget.hpp"
#include "vibtrans/estimates.hpp"
#include "vibtrans/fmo.hpp"
#include "vibtrans/quantized.hpp"
#include "vibtrans/twosite.hpp"

#ifndef VIBTRANS_VERSION
#define VIBTRANS_VERSION "0.0.0"
#endif

namespace vibtrans::run {

namespace {

using config::ConfigError;
using nlohmann::ordered_json;

std::vector<double> grid_fs(const config::RunConfig& cfg) {
    if (!cfg.time_grid) throw std::logic_error("model requires a time grid");
    return qmat::uniform_grid(cfg.time_grid->t_max_fs, cfg.time_grid->dt_fs);
}

std::vector<double> to_ps(const std::vector<double>& fs) {
    std::vector<double> ps(fs.size());
    std::transform(fs.begin(), fs.end(), ps.begin(), [](double t) { return t * 1e-3; });
    return ps;
}

std::vector<double> to_fs(const std::vector<double>& ps) {
    std::vector<double> fs(ps.size());
    std::transform(ps.begin(), ps.end(), fs.begin(), [](double t) { return t * 1e3; });
    return fs;
}

std::vector<double> column_of(const qmat::RealMatrix& m, Eigen::Index c) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) out[static_cast<std::size_t>(r)] = m(r, c);
    return out;
}

qmat::StateVector preset_state(config::SystemPreset p) {
    const double s = 1.0 / std::numbers::sqrt2;
    qmat::ComplexVector v(2);
    switch (p) {
    case config::SystemPreset::Donor: v << 1.0, 0.0; break;
    case config::SystemPreset::Acceptor: v << 0.0, 1.0; break;
    case config::SystemPreset::Plus: v << s, s; break;
    case config::SystemPreset::Minus: v << s, -s; break;
    }
    return qmat::StateVector::normalized(std::move(v));
}

double coherent_alpha(const config::QuantizedBlock& b) {
    return std::get<quantized::Coherent>(b.phonon_state).alpha;
}

twosite::TwoSiteParams semiclassical_params(const config::QuantizedBlock& b) {
    twosite::TwoSiteParams p;
    p.delta = b.delta;
    p.j = b.j;
    p.g = b.phonon.g;
    p.alpha = coherent_alpha(b);
    p.omega = b.phonon.omega;
    return p;
}

struct FmoSetup {
    fmo::FmoParams params; // after shifting
    std::optional<fmo::ShiftResult> shift;
    qmat::ComplexMatrix H;
};

FmoSetup fmo_setup(const config::FmoBlock& b) {
    FmoSetup s;
    s.params = b.params;
    if (b.resonance) {
        s.shift = fmo::apply_resonance_shifts(b.params, *b.resonance);
        s.params = s.shift->params;
    }
    s.H = fmo::fmo_hamiltonian(s.params);
    return s;
}

std::pair<double, double> grid_peak(const std::vector<double>& t, const std::vector<double>& p) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k)
        if (p[k] > p[best]) best = k;
    return {p[best], t[best]};
}

void run_twosite(const config::RunConfig& cfg, const config::TwoSiteBlock& b, RunReport& r) {
    const auto& p = b.params;
    const std::vector<double> t_fs = grid_fs(cfg);
    const qmat::Trajectory traj = twosite::trajectory(p, to_ps(t_fs));
    const twosite::PeakTransfer peak = twosite::peak_transfer(p);

    r.table.columns = {"t_fs", "p_d", "p_a"};
    r.table.data = {t_fs, column_of(traj.populations, 0), column_of(traj.populations, 1)};

    r.metrics["effective_detuning_rad_per_ps"] = p.effective_detuning();
    r.metrics["closed_form_probability"] = twosite::transfer_probability(p.hopping(), p.effective_detuning());
    r.metrics["peak_probability"] = peak.probability;
    r.metrics["peak_time_ps"] = peak.time;
    r.metrics["peak_time_fs"] = peak.time * 1e3;
    if (p.omega > 0.0) r.metrics["residual_detuning_rad_per_ps"] = twosite::residual_detuning(p.g, p.alpha, p.omega, p.j);
}

void run_quantized(const config::RunConfig& cfg, const config::QuantizedBlock& b, RunReport& r) {
    const std::vector<double> t_fs = grid_fs(cfg);
    const std::vector<double> t_ps = to_ps(t_fs);
    r.metrics["analysis"] = std::string(b.analysis == config::QuantizedAnalysis::Trajectory   ? "trajectory"
                                        : b.analysis == config::QuantizedAnalysis::Deviation ? "deviation"
                                                                                              : "witness");
    r.metrics["n_max"] = b.phonon.n_max;

    switch (b.analysis) {
    case config::QuantizedAnalysis::Trajectory: {
        const quantized::PhononState ph0 = quantized::make_phonon_state(b.phonon_state, b.phonon.n_max);
        const quantized::ReducedEvolution ev = quantized::evolve_reduced(
            preset_state(b.system), ph0, quantized::full_hamiltonian(b.delta, b.j, b.phonon), t_ps);
        r.table.columns = {"t_fs", "p_d", "p_a"};
        r.table.data = {t_fs, column_of(ev.populations.populations, 0), column_of(ev.populations.populations, 1)};
        const auto [pk, tk] = grid_peak(t_fs, r.table.data[2]);
        r.metrics["grid_peak_acceptor_population"] = pk;
        r.metrics["grid_peak_time_fs"] = tk;
        r.metrics["mean_phonon_number"] = ph0.mean_number();
        r.metrics["truncation_deficit"] = ph0.truncation_deficit();
        r.metrics["max_edge_population"] = ev.max_edge_population;
        break;
    }
    case config::QuantizedAnalysis::Deviation: {
        const quantized::DeviationResult d =
            quantized::semiclassical_deviation(semiclassical_params(b), b.phonon, t_ps.back(), t_ps.size());
        r.table.columns = {"t_fs", "p_a", "p_a_semiclassical"};
        r.table.data = {to_fs(d.times), d.quantized_acceptor, d.semiclassical_acceptor};
        r.metrics["max_deviation"] = d.max_deviation;
        r.metrics["max_edge_population"] = d.max_edge_population;
        break;
    }
    case config::QuantizedAnalysis::Witness: {
        const quantized::PhononState ph0 = quantized::make_phonon_state(b.phonon_state, b.phonon.n_max);
        const quantized::WitnessResult w = quantized::nonmarkov_witness(
            b.delta, b.j, b.phonon, preset_state(b.witness_a).projector(), preset_state(b.witness_b).projector(), ph0,
            t_ps);
        r.table.columns = {"t_fs", "D"};
        r.table.data = {to_fs(w.times), w.distance};
        r.metrics["witness"] = w.witness;
        r.metrics["initial_distance"] = w.distance.front();
        r.metrics["max_edge_population"] = w.max_edge_population;
        break;
    }
    }
}

void run_fmo(const config::RunConfig& cfg, const config::FmoBlock& b, RunReport& r) {
    const FmoSetup s = fmo_setup(b);
    const fmo::Trajectory traj = fmo::simulate_fmo(s.H, b.initial, cfg.time_grid->t_max_fs, cfg.time_grid->dt_fs);

    r.table.columns = {"t_fs"};
    r.table.data = {traj.times_fs};
    for (int i = 1; i <= fmo::kSites; ++i) {
        r.table.columns.push_back("p" + std::to_string(i));
        r.table.data.push_back(column_of(traj.populations, i - 1));
    }
    if (b.coherences) {
        for (int i = 1; i <= fmo::kSites; ++i)
            for (int j = i + 1; j <= fmo::kSites; ++j) {
                r.table.columns.push_back("c" + std::to_string(i) + std::to_string(j));
                std::vector<double> c(traj.size());
                for (std::size_t k = 0; k < traj.size(); ++k) c[k] = traj.coherence(k, i, j);
                r.table.data.push_back(std::move(c));
            }
    }

    r.metrics["label"] = b.params.label;
    if (s.shift) {
        r.metrics["target_energy_cm"] = s.shift->target_energy;
        r.metrics["site_shifts_cm"] = s.shift->shifts;
    }
    const fmo::CaptureMetrics cap = fmo::capture_metrics(traj, b.capture_site);
    r.metrics["capture_site"] = cap.site;
    r.metrics["peak_probability"] = cap.peak_probability;
    r.metrics["peak_time_fs"] = cap.peak_time_fs;
    if (const auto* bp = std::get_if<fmo::init::Backprop>(&b.initial)) {
        // evaluated at t_star itself, independent of the output grid
        const qmat::StateVector psi0 = fmo::initial_state(s.H, b.initial);
        const qmat::ComplexVector psi = qmat::Propagator(s.H).apply(psi0.amplitudes(), bp->t_star_fs * 1e-3);
        r.metrics["t_star_fs"] = bp->t_star_fs;
        r.metrics["population_at_t_star"] = std::norm(psi(bp->site - 1));
    }
    r.metrics["mean_populations"] = fmo::mean_populations(traj);
}

void run_sweep(const config::SweepBlock& b, const RunOptions& options, RunReport& r) {
    errorbudget::Execution exec;
    exec.threads = std::max(1u, options.threads);
    const errorbudget::EfficiencyCurve c = errorbudget::run_sweep(b.spec, exec);
    r.table.columns = {"axis_value", "mean_efficiency", "standard_error"};
    r.table.data = {c.axis_values, c.mean_efficiency, c.standard_error};
    r.metrics["axis"] = std::string(errorbudget::axis_name(b.spec.axis));
    r.metrics["points"] = c.axis_values.size();
    r.metrics["samples"] = b.spec.samples;
    r.metrics["min_efficiency"] = *std::min_element(c.mean_efficiency.begin(), c.mean_efficiency.end());
    r.metrics["max_efficiency"] = *std::max_element(c.mean_efficiency.begin(), c.mean_efficiency.end());
}

void run_estimate(const config::EstimateBlock& b, RunReport& r) {
    const double ratio = estimates::decoherence_ratio(b.mass_kg, b.coherence_length_m, b.temperature_K);
    const double energy = estimates::absorbed_energy(b.flux_W_per_m2, b.area_m2, b.duration_s);
    const double alpha = estimates::alpha_from_flux(b.flux_W_per_m2, b.area_m2, b.duration_s, b.phonon_energy_J);
    const double omega = estimates::wavenumber_to_angular(b.wavenumber_cm);
    r.table.columns = {"decoherence_ratio", "absorbed_energy_J", "alpha", "angular_frequency_rad_per_ps"};
    r.table.data = {{ratio}, {energy}, {alpha}, {omega}};
    r.metrics["decoherence_ratio"] = ratio;
    r.metrics["absorbed_energy_J"] = energy;
    r.metrics["alpha"] = alpha;
    r.metrics["angular_frequency_rad_per_ps"] = omega;
}

std::string model_key(const config::RunConfig& cfg) { return std::string(config::model_name(cfg.model)); }

// --- conservation -----------------------------------------------------------------

struct Dynamics {
    qmat::ComplexMatrix H;
    quantized::Ensemble first, second;
    std::vector<double> times;
};

quantized::Ensemble pure(const qmat::StateVector& psi) { return {{1.0}, {psi.amplitudes()}}; }

std::vector<double> rabi_window(const twosite::TwoSiteParams& p) {
    const double gap = std::hypot(p.hopping(), p.effective_detuning());
    return qmat::uniform_grid(4.0 * std::numbers::pi / gap, std::numbers::pi / gap / 50.0);
}

Dynamics dynamics_of(const config::RunConfig& cfg) {
    Dynamics d;
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, config::TwoSiteBlock>) {
                d.H = twosite::semiclassical_hamiltonian(b.params);
                d.first = pure(preset_state(config::SystemPreset::Donor));
                d.second = pure(preset_state(config::SystemPreset::Plus));
                d.times = to_ps(grid_fs(cfg));
            } else if constexpr (std::is_same_v<T, config::QuantizedBlock>) {
                d.H = quantized::full_hamiltonian(b.delta, b.j, b.phonon);
                const quantized::PhononState ph0 = quantized::make_phonon_state(b.phonon_state, b.phonon.n_max);
                config::SystemPreset a = b.system, c = b.system == config::SystemPreset::Donor
                                                            ? config::SystemPreset::Acceptor
                                                            : config::SystemPreset::Donor;
                if (b.analysis == config::QuantizedAnalysis::Witness) {
                    a = b.witness_a;
                    c = b.witness_b;
                }
                d.first = quantized::product_ensemble(pure(preset_state(a)), ph0.ensemble());
                d.second = quantized::product_ensemble(pure(preset_state(c)), ph0.ensemble());
                d.times = to_ps(grid_fs(cfg));
            } else if constexpr (std::is_same_v<T, config::FmoBlock>) {
                const FmoSetup s = fmo_setup(b);
                d.H = s.H;
                d.first = pure(fmo::initial_state(s.H, b.initial));
                const fmo::InitialStateSpec other = std::holds_alternative<fmo::init::Uniform>(b.initial)
                                                        ? fmo::InitialStateSpec{fmo::init::Site{1}}
                                                        : fmo::InitialStateSpec{fmo::init::Uniform{}};
                d.second = pure(fmo::initial_state(s.H, other));
                d.times = to_ps(grid_fs(cfg));
            } else if constexpr (std::is_same_v<T, config::SweepBlock>) {
                d.H = twosite::semiclassical_hamiltonian(b.spec.base);
                d.first = pure(preset_state(config::SystemPreset::Donor));
                d.second = pure(preset_state(config::SystemPreset::Plus));
                d.times = rabi_window(b.spec.base);
            }
        },
        cfg.block);
    return d;
}

qmat::DensityMatrix density_of(const std::vector<double>& w, const std::vector<qmat::ComplexVector>& states) {
    const Eigen::Index n = states.front().size();
    qmat::ComplexMatrix rho = qmat::ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < states.size(); ++k) rho += w[k] * states[k] * states[k].adjoint();
    return qmat::DensityMatrix::trusted(std::move(rho));
}

double distance(const quantized::Ensemble& a, const std::vector<qmat::ComplexVector>& sa, const quantized::Ensemble& b,
                const std::vector<qmat::ComplexVector>& sb) {
    if (sa.size() == 1 && sb.size() == 1) {
        const double overlap = std::norm(sa.front().dot(sb.front()));
        return std::sqrt(std::max(0.0, 1.0 - overlap));
    }
    return qmat::trace_distance(density_of(a.weights, sa), density_of(b.weights, sb));
}

} // namespace

const std::vector<double>& Table::column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return data[k];
    throw std::out_of_range("no column '" + name + "'");
}

RunReport run(const config::RunConfig& cfg, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    RunReport r;
    r.resolved_config = ordered_json::parse(config::to_json(cfg).dump());
    r.config_hash = config::config_hash(cfg);
    r.metrics = ordered_json::object();
    r.metrics["model"] = model_key(cfg);
    try {
        std::visit(
            [&](const auto& b) {
                using T = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<T, config::TwoSiteBlock>) run_twosite(cfg, b, r);
                else if constexpr (std::is_same_v<T, config::QuantizedBlock>) run_quantized(cfg, b, r);
                else if constexpr (std::is_same_v<T, config::FmoBlock>) run_fmo(cfg, b, r);
                else if constexpr (std::is_same_v<T, config::SweepBlock>) run_sweep(b, options, r);
                else run_estimate(b, r);
            },
            cfg.block);
    } catch (const quantized::TruncationError& e) {
        throw ConfigError(model_key(cfg) + ".n_max",
                          std::string(e.what()) + " (needs n_max >= " + std::to_string(e.required_n_max()) + ")");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(model_key(cfg), e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(model_key(cfg), e.what());
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string header_line(const std::string& config_hash) {
    return std::string("# vibtrans ") + VIBTRANS_VERSION + " config_hash=" + config_hash;
}

std::string render_csv(const RunReport& report) {
    std::string out = header_line(report.config_hash) + "\n";
    for (std::size_t c = 0; c < report.table.columns.size(); ++c) {
        if (c) out += ',';
        out += report.table.columns[c];
    }
    out += '\n';
    char buf[32];
    for (std::size_t row = 0; row < report.table.rows(); ++row) {
        for (std::size_t c = 0; c < report.table.data.size(); ++c) {
            if (c) out += ',';
            std::snprintf(buf, sizeof buf, "%.17g", report.table.data[c][row]);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const RunReport& report) {
    ordered_json j;
    j["tool_version"] = VIBTRANS_VERSION;
    j["config_hash"] = report.config_hash;
    j["config"] = report.resolved_config;
    j["metrics"] = report.metrics;
    j["columns"] = report.table.columns;
    ordered_json data = ordered_json::object();
    for (std::size_t c = 0; c < report.table.columns.size(); ++c) data[report.table.columns[c]] = report.table.data[c];
    j["data"] = data;
    return j.dump(2) + "\n";
}

void write_output(const RunReport& report, const config::OutputSpec& output) {
    const std::string text = output.format == config::OutputFormat::Csv ? render_csv(report) : render_json(report);
    std::ofstream out(output.path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file '" + output.path + "'");
    out << text;
    if (!out) throw std::runtime_error("failed writing output file '" + output.path + "'");
}

std::optional<ConservationMetrics> conservation_metrics(const config::RunConfig& cfg, std::size_t max_samples) {
    if (cfg.model == config::Model::Estimate) return std::nullopt;
    const Dynamics d = dynamics_of(cfg);
    const qmat::Propagator U(d.H);
    const double scale = U.spectrum().eigenvalues.cwiseAbs().maxCoeff();

    std::vector<qmat::ComplexVector> ca, cb;
    for (const auto& s : d.first.states) ca.push_back(U.to_eigenbasis(s));
    for (const auto& s : d.second.states) cb.push_back(U.to_eigenbasis(s));

    auto energy = [&](const std::vector<qmat::ComplexVector>& states) {
        double e = 0.0;
        for (std::size_t k = 0; k < states.size(); ++k) e += d.first.weights[k] * states[k].dot(d.H * states[k]).real();
        return e;
    };

    ConservationMetrics m;
    const std::size_t n = d.times.size();
    const std::size_t count = std::min(n, std::max<std::size_t>(max_samples, 2));
    // dense U(t) is O(dim^3); only a handful of times for large spaces
    const std::size_t unitary_every = d.H.rows() > 64 ? std::max<std::size_t>(count / 4, 1) : 1;

    double e0 = 0.0, d0 = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t idx = count == 1 ? 0 : s * (n - 1) / (count - 1);
        const double t = d.times[idx];
        std::vector<qmat::ComplexVector> sa, sb;
        for (const auto& c : ca) sa.push_back(U.from_eigenbasis(c, t));
        for (const auto& c : cb) sb.push_back(U.from_eigenbasis(c, t));

        double norm = 0.0;
        for (std::size_t k = 0; k < sa.size(); ++k) norm += d.first.weights[k] * sa[k].squaredNorm();
        m.population_sum_defect = std::max(m.population_sum_defect, std::abs(norm - 1.0));

        const double e = energy(sa);
        const double dist = distance(d.first, sa, d.second, sb);
        if (s == 0) {
            e0 = e;
            d0 = dist;
        }
        m.energy_drift = std::max(m.energy_drift, std::abs(e - e0) / std::max({std::abs(e0), scale, 1e-300}));
        m.trace_distance_drift = std::max(m.trace_distance_drift, std::abs(dist - d0));
        if (s % unitary_every == 0 || s + 1 == count)
            m.unitarity_defect = std::max(m.unitarity_defect, qmat::unitarity_defect(U.at(t)));
        ++m.samples;
    }
    return m;
}

} // namespace vibtrans::run
