#include "vibtrans/fmo.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vibtrans/estimates.hpp"
#include "vibtrans/units.hpp"

namespace vibtrans::fmo {

namespace {

using units::ConfigError;

void require_site(int site, const char* what) {
    if (site < 1 || site > kSites) {
        std::ostringstream os;
        os << what << " must be a site index in 1..7, got " << site;
        throw std::invalid_argument(os.str());
    }
}

std::array<std::array<double, kSites>, kSites> load_matrix(const nlohmann::json& node, const std::string& path) {
    if (!node.is_object()) throw ConfigError(path, "expected {\"unit\": ..., \"values\": [[...], ...]}");
    for (const auto& [key, _] : node.items())
        if (key != "unit" && key != "values") throw ConfigError(path + "." + key, "unknown key");
    if (!node.contains("unit") || !node["unit"].is_string()) throw ConfigError(path, "coupling matrix requires an explicit unit");
    if (!node.contains("values")) throw ConfigError(path, "missing required field 'values'");
    const auto& rows = node["values"];
    if (!rows.is_array() || rows.size() != kSites)
        throw ConfigError(path + ".values", "expected 7 rows, got " + std::to_string(rows.is_array() ? rows.size() : 0));
    const std::string unit = node["unit"].get<std::string>();
    std::array<std::array<double, kSites>, kSites> m{};
    for (int i = 0; i < kSites; ++i) {
        const std::string rp = path + ".values[" + std::to_string(i) + "]";
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || row.size() != kSites)
            throw ConfigError(rp, "expected 7 columns, got " + std::to_string(row.is_array() ? row.size() : 0));
        for (int j = 0; j < kSites; ++j) {
            const std::string ep = rp + "[" + std::to_string(j) + "]";
            const auto& v = row[static_cast<std::size_t>(j)];
            if (!v.is_number()) throw ConfigError(ep, "expected a number");
            try {
                m[i][j] = units::convert(v.get<double>(), unit, "cm^-1");
            } catch (const std::invalid_argument& e) {
                throw ConfigError(path + ".unit", e.what());
            }
        }
    }
    return m;
}

} // namespace

void FmoParams::validate() const {
    for (int i = 0; i < kSites; ++i) {
        if (!std::isfinite(site_energies[i])) throw std::invalid_argument("site energies must be finite");
        if (couplings[i][i] != 0.0) {
            std::ostringstream os;
            os << "coupling matrix diagonal must be zero (site " << i + 1 << " has " << couplings[i][i] << ")";
            throw std::invalid_argument(os.str());
        }
        for (int j = 0; j < kSites; ++j) {
            if (!std::isfinite(couplings[i][j])) throw std::invalid_argument("couplings must be finite");
            if (std::abs(couplings[i][j] - couplings[j][i]) > 1e-12) {
                std::ostringstream os;
                os << "coupling matrix is not symmetric: J[" << i + 1 << "][" << j + 1 << "] = " << couplings[i][j]
                   << " but J[" << j + 1 << "][" << i + 1 << "] = " << couplings[j][i];
                throw std::invalid_argument(os.str());
            }
        }
    }
}

FmoParams load_fmo(const nlohmann::json& block, const std::string& path) {
    if (!block.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& [key, _] : block.items())
        if (key != "label" && key != "site_energies" && key != "couplings") throw ConfigError(path + "." + key, "unknown key");
    if (!block.contains("site_energies")) throw ConfigError(path, "missing required field 'site_energies'");
    if (!block.contains("couplings")) throw ConfigError(path, "missing required field 'couplings'");

    FmoParams p;
    const std::vector<double> e = units::quantity_array(block["site_energies"], path + ".site_energies", "cm^-1", kSites);
    std::copy(e.begin(), e.end(), p.site_energies.begin());
    p.couplings = load_matrix(block["couplings"], path + ".couplings");
    if (block.contains("label")) {
        if (!block["label"].is_string()) throw ConfigError(path + ".label", "expected a string");
        p.label = block["label"].get<std::string>();
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(path + ".couplings", err.what());
    }
    return p;
}

nlohmann::json to_json(const FmoParams& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : p.couplings) rows.push_back(row);
    return {
        {"label", p.label},
        {"site_energies", {{"unit", "cm^-1"}, {"values", p.site_energies}}},
        {"couplings", {{"unit", "cm^-1"}, {"values", rows}}},
    };
}

qmat::ComplexMatrix fmo_hamiltonian(const FmoParams& p) {
    p.validate();
    qmat::ComplexMatrix H = qmat::ComplexMatrix::Zero(kSites, kSites);
    for (int i = 0; i < kSites; ++i) {
        H(i, i) = estimates::wavenumber_to_angular(p.site_energies[i]);
        for (int j = i + 1; j < kSites; ++j) {
            const double jij = estimates::wavenumber_to_angular(p.couplings[i][j]);
            H(i, j) = jij;
            H(j, i) = jij;
        }
    }
    return H;
}

ShiftResult apply_resonance_shifts(const FmoParams& p, const ResonanceTarget& target) {
    p.validate();
    ShiftResult out;
    if (std::holds_alternative<MeanEnergy>(target)) {
        out.target_energy = std::accumulate(p.site_energies.begin(), p.site_energies.end(), 0.0) / kSites;
    } else {
        const int site = std::get<SiteEnergy>(target).site;
        require_site(site, "resonance target");
        out.target_energy = p.site_energies[site - 1];
    }
    out.params = p;
    for (int i = 0; i < kSites; ++i) {
        out.shifts[i] = out.target_energy - p.site_energies[i];
        out.params.site_energies[i] = out.target_energy;
    }
    return out;
}

qmat::StateVector backprop_initial_state(const qmat::ComplexMatrix& H7, int site, double t_star_fs) {
    require_site(site, "backprop site");
    if (H7.rows() != kSites) throw qmat::DimensionError("seven-site Hamiltonian expected");
    if (!std::isfinite(t_star_fs)) throw std::invalid_argument("t_star must be finite");
    const qmat::ComplexMatrix U = qmat::propagator(H7, t_star_fs * 1e-3);
    const qmat::ComplexVector target = qmat::StateVector::basis(kSites, site - 1).amplitudes();
    return qmat::StateVector::normalized(U.adjoint() * target);
}

qmat::StateVector initial_state(const qmat::ComplexMatrix& H7, const InitialStateSpec& spec) {
    return std::visit(
        [&](const auto& s) -> qmat::StateVector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, init::Uniform>) {
                return qmat::StateVector(qmat::ComplexVector::Constant(kSites, 1.0 / std::sqrt(double(kSites))));
            } else if constexpr (std::is_same_v<T, init::Site>) {
                require_site(s.site, "initial site");
                return qmat::StateVector::basis(kSites, s.site - 1);
            } else if constexpr (std::is_same_v<T, init::Backprop>) {
                return backprop_initial_state(H7, s.site, s.t_star_fs);
            } else {
                qmat::ComplexVector v(kSites);
                for (int i = 0; i < kSites; ++i) v(i) = s.amplitudes[i];
                return qmat::StateVector(std::move(v));
            }
        },
        spec);
}

double Trajectory::coherence(std::size_t k, int i, int j) const {
    require_site(i, "coherence site");
    require_site(j, "coherence site");
    const auto row = static_cast<Eigen::Index>(k);
    return std::abs(amplitudes(row, i - 1) * std::conj(amplitudes(row, j - 1)));
}

Trajectory simulate_fmo(const qmat::ComplexMatrix& H7, const InitialStateSpec& spec, double t_max_fs, double dt_fs) {
    if (H7.rows() != kSites || H7.cols() != kSites) throw qmat::DimensionError("seven-site Hamiltonian expected");
    if (!(dt_fs > 0.0) || !(t_max_fs >= dt_fs)) throw std::invalid_argument("simulation requires dt > 0 and t_max >= dt");
    const qmat::StateVector psi0 = initial_state(H7, spec);
    const qmat::Propagator U(H7);
    const qmat::ComplexVector coeffs = U.to_eigenbasis(psi0.amplitudes());

    Trajectory out;
    out.times_fs = qmat::uniform_grid(t_max_fs, dt_fs);
    const auto n = static_cast<Eigen::Index>(out.times_fs.size());
    out.populations.resize(n, kSites);
    out.amplitudes.resize(n, kSites);
    for (Eigen::Index k = 0; k < n; ++k) {
        const qmat::ComplexVector psi = U.from_eigenbasis(coeffs, out.times_fs[static_cast<std::size_t>(k)] * 1e-3);
        out.amplitudes.row(k) = psi.transpose();
        out.populations.row(k) = psi.cwiseAbs2().transpose();
    }
    return out;
}

CaptureMetrics capture_metrics(const Trajectory& traj, int site) {
    require_site(site, "capture site");
    if (traj.size() == 0) throw std::invalid_argument("capture metrics of an empty trajectory");
    CaptureMetrics m;
    m.site = site;
    m.peak_probability = traj.populations(0, site - 1);
    m.peak_time_fs = traj.times_fs[0];
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double p = traj.populations(static_cast<Eigen::Index>(k), site - 1);
        if (p > m.peak_probability) {
            m.peak_probability = p;
            m.peak_time_fs = traj.times_fs[k];
        }
    }
    return m;
}

std::array<double, kSites> mean_populations(const Trajectory& traj) {
    if (traj.size() == 0) throw std::invalid_argument("mean populations of an empty trajectory");
    std::array<double, kSites> out{};
    const qmat::RealVector mean = traj.populations.colwise().mean().transpose();
    for (int i = 0; i < kSites; ++i) out[i] = mean(i);
    return out;
}

} // namespace vibtrans::fmo
