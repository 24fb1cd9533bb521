#include "vibtrans/quantized.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace vibtrans::quantized {

namespace {

constexpr double kDeficitTolerance = 1e-8;
constexpr double kMeanTolerance = 1e-6;

using qmat::Complex;
using qmat::ComplexMatrix;
using qmat::ComplexVector;

std::string cutoff_message(const std::string& what, double deficit, int required) {
    std::ostringstream os;
    os << what << ": truncation norm deficit " << deficit << " exceeds " << kDeficitTolerance
       << "; use n_max >= " << required;
    return os.str();
}

// Columns 0..count-1 of the displacement operator exp(alpha (a^dagger - a)),
// truncated to `levels` rows. The working space is `work` levels; the
// generator is i^n-conjugated to a real symmetric tridiagonal matrix T with
// off-diagonals alpha sqrt(n+1), so D = S exp(-i T) S^dagger with S = diag(i^n).
Eigen::MatrixXd displaced_number_states(double alpha, Eigen::Index count, Eigen::Index levels, Eigen::Index work) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(work);
    Eigen::VectorXd sub(work - 1);
    for (Eigen::Index n = 0; n + 1 < work; ++n) sub(n) = alpha * std::sqrt(static_cast<double>(n + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw std::runtime_error("displacement eigensolver did not converge");
    const Eigen::MatrixXd& V = solver.eigenvectors();
    const Eigen::VectorXd& lambda = solver.eigenvalues();

    // exp(-iT)_{mn} = sum_k V_mk e^{-i lambda_k} V_nk; D_mn = i^{m-n} exp(-iT)_{mn}
    ComplexMatrix right(work, count);
    for (Eigen::Index k = 0; k < work; ++k) {
        const Complex phase = std::polar(1.0, -lambda(k));
        for (Eigen::Index n = 0; n < count; ++n) right(k, n) = phase * V(n, k);
    }
    const ComplexMatrix expT = V.topRows(levels).cast<Complex>() * right;
    Eigen::MatrixXd out(levels, count);
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (Eigen::Index m = 0; m < levels; ++m)
        for (Eigen::Index n = 0; n < count; ++n) out(m, n) = (ipow[((m - n) % 4 + 4) % 4] * expT(m, n)).real();
    return out;
}

qmat::DensityMatrix density_from(const Ensemble& e, Eigen::Index dim) {
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < e.states.size(); ++k) rho.noalias() += e.weights[k] * (e.states[k] * e.states[k].adjoint());
    return qmat::DensityMatrix::trusted(std::move(rho));
}

void check_pure_input_norm(double norm_sq, const char* what) {
    if (!(norm_sq > 0.0)) throw std::invalid_argument(std::string(what) + ": empty state");
}

} // namespace

int coherent_cutoff(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite and >= 0");
    return static_cast<int>(std::ceil(alpha * alpha + 10.0 * alpha + 10.0));
}

int displaced_thermal_cutoff(double alpha, double nbar) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("nbar must be finite and >= 0");
    const double a_eff = alpha + (nbar > 0.0 ? 2.0 * std::sqrt(nbar) : 0.0);
    int tail = 0;
    if (nbar > 0.0) tail = static_cast<int>(std::ceil(std::log(1e-10) / std::log(nbar / (1.0 + nbar))));
    return coherent_cutoff(a_eff) + tail;
}

Ensemble ensemble_of(const qmat::DensityMatrix& rho) {
    const qmat::EigenDecomposition eig = qmat::hermitian_eigendecomposition(rho.matrix());
    Ensemble out;
    for (Eigen::Index k = eig.dim() - 1; k >= 0; --k) {
        const double w = eig.eigenvalues(k);
        if (w <= 1e-14) continue;
        out.weights.push_back(w);
        out.states.push_back(eig.eigenvectors.col(k));
    }
    return out;
}

Ensemble product_ensemble(const Ensemble& system, const Ensemble& phonon) {
    Ensemble out;
    for (std::size_t i = 0; i < system.states.size(); ++i)
        for (std::size_t k = 0; k < phonon.states.size(); ++k) {
            out.weights.push_back(system.weights[i] * phonon.weights[k]);
            out.states.push_back(qmat::kron(system.states[i], phonon.states[k]));
        }
    return out;
}

// --- phonon states ------------------------------------------------------------

PhononState::PhononState(PhononKind kind, int n_max, Ensemble ensemble, double deficit)
    : kind_(std::move(kind)),
      n_max_(n_max),
      ensemble_(std::move(ensemble)),
      density_(density_from(ensemble_, n_max + 1)),
      deficit_(deficit) {}

double PhononState::mean_number() const {
    const qmat::RealVector pops = density_.populations();
    double mean = 0.0;
    for (Eigen::Index n = 0; n < pops.size(); ++n) mean += static_cast<double>(n) * pops(n);
    return mean;
}

PhononState coherent_state(double alpha, int n_max) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("coherent amplitude must be finite and >= 0");
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    ComplexVector c = ComplexVector::Zero(n_max + 1);
    if (alpha == 0.0) {
        c(0) = 1.0;
    } else {
        const double log_alpha = std::log(alpha);
        for (int n = 0; n <= n_max; ++n)
            c(n) = std::exp(-0.5 * alpha * alpha + n * log_alpha - 0.5 * std::lgamma(n + 1.0));
    }
    const double kept = c.squaredNorm();
    const double deficit = std::max(0.0, 1.0 - kept);
    if (deficit > kDeficitTolerance)
        throw TruncationError(cutoff_message("coherent state", deficit, coherent_cutoff(alpha)), coherent_cutoff(alpha));
    c /= std::sqrt(kept);

    Ensemble e{{1.0}, {std::move(c)}};
    PhononState state(Coherent{alpha}, n_max, std::move(e), deficit);
    const double target = alpha * alpha;
    if (target > 0.0 && std::abs(state.mean_number() - target) > kMeanTolerance * target)
        throw TruncationError("coherent state mean number off by more than 1e-6 relative", coherent_cutoff(alpha));
    return state;
}

PhononState displaced_thermal_state(double alpha, double nbar, int n_max) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("displacement must be finite and >= 0");
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("nbar must be finite and >= 0");
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    if (nbar == 0.0) {
        PhononState c = coherent_state(alpha, n_max);
        return PhononState(DisplacedThermal{alpha, 0.0}, n_max, c.ensemble(), c.truncation_deficit());
    }

    const double ratio = nbar / (1.0 + nbar);
    // thermal components beyond `count` carry less than 1e-12 total weight
    const auto count = static_cast<Eigen::Index>(std::ceil(std::log(1e-12) / std::log(ratio))) + 1;
    const double reach = alpha + std::sqrt(static_cast<double>(count));
    const auto work = std::max<Eigen::Index>(
        n_max + 1, static_cast<Eigen::Index>(std::ceil(reach * reach + 10.0 * reach + 10.0))) + 40;
    const Eigen::Index levels = n_max + 1;

    Eigen::MatrixXd cols;
    if (alpha == 0.0) {
        cols = Eigen::MatrixXd::Identity(work, count).topRows(levels);
    } else {
        cols = displaced_number_states(alpha, count, levels, work);
    }

    Ensemble e;
    double kept = 0.0;
    double weight = 1.0 / (1.0 + nbar);
    for (Eigen::Index n = 0; n < count; ++n, weight *= ratio) {
        ComplexVector v = cols.col(n).cast<Complex>();
        const double norm_sq = v.squaredNorm();
        kept += weight * norm_sq;
        if (weight * norm_sq < 1e-16) continue;
        e.weights.push_back(weight * norm_sq);
        e.states.push_back(v / std::sqrt(norm_sq));
    }
    const double deficit = std::max(0.0, 1.0 - kept);
    const int required = displaced_thermal_cutoff(alpha, nbar);
    if (deficit > kDeficitTolerance) throw TruncationError(cutoff_message("displaced thermal state", deficit, required), required);
    for (double& w : e.weights) w /= kept;

    PhononState state(DisplacedThermal{alpha, nbar}, n_max, std::move(e), deficit);
    const double target = alpha * alpha + nbar;
    if (std::abs(state.mean_number() - target) > kMeanTolerance * target)
        throw TruncationError("displaced thermal mean number off by more than 1e-6 relative", required);
    return state;
}

PhononState number_state(int n, int n_max) {
    if (n < 0) throw std::invalid_argument("number state index must be >= 0");
    if (n > n_max) {
        std::ostringstream os;
        os << "number state |" << n << "> does not fit below n_max = " << n_max;
        throw TruncationError(os.str(), n);
    }
    ComplexVector v = ComplexVector::Zero(n_max + 1);
    v(n) = 1.0;
    return PhononState(Number{n}, n_max, Ensemble{{1.0}, {std::move(v)}}, 0.0);
}

PhononState make_phonon_state(const PhononKind& kind, int n_max) {
    return std::visit(
        [n_max](const auto& k) -> PhononState {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Coherent>) return coherent_state(k.alpha, n_max);
            else if constexpr (std::is_same_v<T, DisplacedThermal>) return displaced_thermal_state(k.alpha, k.nbar, n_max);
            else return number_state(k.n, n_max);
        },
        kind);
}

// --- Hamiltonian and evolution -------------------------------------------------

ComplexMatrix full_hamiltonian(double delta, double j, const PhononSpec& spec) {
    if (spec.n_max < 1) throw std::invalid_argument("full Hamiltonian requires n_max >= 1");
    if (!std::isfinite(delta) || !std::isfinite(j) || !std::isfinite(spec.omega) || !std::isfinite(spec.g))
        throw std::invalid_argument("Hamiltonian parameters must be finite");
    const Eigen::Index N = spec.levels();
    ComplexMatrix H = ComplexMatrix::Zero(2 * N, 2 * N);
    for (Eigen::Index s = 0; s < 2; ++s) {
        const double sz = (s == 0) ? 1.0 : -1.0;
        for (Eigen::Index n = 0; n < N; ++n) {
            const Eigen::Index i = s * N + n;
            H(i, i) = sz * delta + spec.omega * static_cast<double>(n);
            if (n + 1 < N) {
                const double x = -0.5 * spec.g * sz * std::sqrt(static_cast<double>(n + 1));
                H(i, i + 1) = x;
                H(i + 1, i) = x;
            }
        }
    }
    for (Eigen::Index n = 0; n < N; ++n) {
        H(n, N + n) = j;
        H(N + n, n) = j;
    }
    return H;
}

CoupledEvolution::CoupledEvolution(std::shared_ptr<const qmat::Propagator> propagator, Eigen::Index system_dim,
                                   Eigen::Index phonon_dim, Ensemble initial)
    : propagator_(std::move(propagator)), system_dim_(system_dim), phonon_dim_(phonon_dim) {
    if (!propagator_) throw std::invalid_argument("null propagator");
    if (system_dim_ * phonon_dim_ != propagator_->dim())
        throw qmat::DimensionError("system x phonon dimension does not match the Hamiltonian");
    if (initial.states.empty()) throw std::invalid_argument("initial ensemble is empty");
    weights_ = std::move(initial.weights);
    coeffs_.reserve(initial.states.size());
    for (const ComplexVector& psi : initial.states) {
        check_pure_input_norm(psi.squaredNorm(), "initial ensemble");
        coeffs_.push_back(propagator_->to_eigenbasis(psi));
    }
}

std::vector<ComplexVector> CoupledEvolution::evolved(double t) const {
    std::vector<ComplexVector> out;
    out.reserve(coeffs_.size());
    for (const ComplexVector& c : coeffs_) out.push_back(propagator_->from_eigenbasis(c, t));
    return out;
}

qmat::DensityMatrix CoupledEvolution::reduced_state(double t) const {
    const std::vector<ComplexVector> psi = evolved(t);
    ComplexMatrix red = ComplexMatrix::Zero(system_dim_, system_dim_);
    for (std::size_t k = 0; k < psi.size(); ++k)
        for (Eigen::Index s = 0; s < system_dim_; ++s)
            for (Eigen::Index r = 0; r < system_dim_; ++r)
                red(s, r) += weights_[k] * psi[k].segment(s * phonon_dim_, phonon_dim_).dot(
                                               psi[k].segment(r * phonon_dim_, phonon_dim_));
    // dot() conjugates its left operand: red(s, r) above is <psi_s|psi_r>, i.e. rho_{r s}
    return qmat::DensityMatrix::trusted(red.transpose());
}

qmat::DensityMatrix CoupledEvolution::full_state(double t) const {
    Ensemble e{weights_, evolved(t)};
    return density_from(e, propagator_->dim());
}

double CoupledEvolution::edge_population(double t) const {
    const std::vector<ComplexVector> psi = evolved(t);
    const Eigen::Index top = std::min<Eigen::Index>(2, phonon_dim_);
    double edge = 0.0;
    for (std::size_t k = 0; k < psi.size(); ++k)
        for (Eigen::Index s = 0; s < system_dim_; ++s)
            edge += weights_[k] * psi[k].segment((s + 1) * phonon_dim_ - top, top).squaredNorm();
    return edge;
}

ReducedEvolution evolve_reduced(const qmat::StateVector& sys0, const PhononState& ph0, const ComplexMatrix& H,
                                std::span<const double> times, const EvolveOptions& options) {
    if (sys0.dim() != 2) throw qmat::DimensionError("system state must live in span{|d>, |a>}");
    if (H.rows() != 2 * (ph0.n_max() + 1)) throw qmat::DimensionError("Hamiltonian dimension does not match 2 (n_max + 1)");
    return evolve_reduced(qmat::DensityMatrix::pure(sys0), ph0, std::make_shared<const qmat::Propagator>(H), times,
                          options);
}

ReducedEvolution evolve_reduced(const qmat::DensityMatrix& sys0, const PhononState& ph0,
                                std::shared_ptr<const qmat::Propagator> propagator, std::span<const double> times,
                                const EvolveOptions& options) {
    if (sys0.dim() != 2) throw qmat::DimensionError("system state must live in span{|d>, |a>}");
    const Eigen::Index N = ph0.n_max() + 1;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k]) || (k == 0 && times[k] < 0.0) || (k > 0 && !(times[k] > times[k - 1])))
            throw std::invalid_argument("time grid must be finite, start at t >= 0 and ascend strictly");
    }
    const CoupledEvolution evo(std::move(propagator), 2, N, product_ensemble(ensemble_of(sys0), ph0.ensemble()));

    ReducedEvolution out;
    out.populations.times.assign(times.begin(), times.end());
    out.populations.populations.resize(static_cast<Eigen::Index>(times.size()), 2);
    out.reduced.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        qmat::DensityMatrix red = evo.reduced_state(times[k]);
        out.populations.populations.row(static_cast<Eigen::Index>(k)) = red.populations().transpose();
        out.reduced.push_back(std::move(red));
        out.max_edge_population = std::max(out.max_edge_population, evo.edge_population(times[k]));
    }
    out.truncation_ok = out.max_edge_population <= options.leakage_tolerance;
    if (!out.truncation_ok && !options.allow_leakage) {
        std::ostringstream os;
        os << "Fock truncation leakage: top two levels reach population " << out.max_edge_population << " (limit "
           << options.leakage_tolerance << "); increase n_max beyond " << ph0.n_max();
        throw TruncationError(os.str(), 2 * ph0.n_max());
    }
    return out;
}

DeviationResult semiclassical_deviation(const twosite::TwoSiteParams& p, const PhononSpec& spec, double horizon,
                                        std::size_t points) {
    p.validate();
    if (p.convention != twosite::Convention::Effective)
        throw std::invalid_argument("semiclassical comparison is defined for the Effective convention");
    if (p.g != spec.g || p.omega != spec.omega)
        throw std::invalid_argument("two-site parameters and phonon spec disagree on g or omega");
    const double delta_eff = p.effective_detuning();
    const double period = std::numbers::pi / std::sqrt(p.j * p.j + delta_eff * delta_eff);
    if (!(horizon >= period * (1.0 - 1e-12)))
        throw std::invalid_argument("horizon must cover at least one Rabi period");
    if (points < 2) throw std::invalid_argument("deviation grid needs at least two points");

    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k) grid[k] = horizon * static_cast<double>(k) / static_cast<double>(points - 1);

    const PhononState ph0 = coherent_state(p.alpha, spec.n_max);
    const ReducedEvolution q =
        evolve_reduced(qmat::StateVector::basis(2, 0), ph0, full_hamiltonian(p.delta, p.j, spec), grid);
    const qmat::Trajectory sc = twosite::trajectory(p, grid);

    DeviationResult out;
    out.times = grid;
    out.max_edge_population = q.max_edge_population;
    for (std::size_t k = 0; k < points; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        out.quantized_acceptor.push_back(q.populations.populations(row, 1));
        out.semiclassical_acceptor.push_back(sc.populations(row, 1));
        out.max_deviation = std::max(out.max_deviation, std::abs(q.populations.populations(row, 1) - sc.populations(row, 1)));
    }
    return out;
}

WitnessResult nonmarkov_witness(double delta, double j, const PhononSpec& spec, const qmat::DensityMatrix& rho_a,
                                const qmat::DensityMatrix& rho_b, const PhononState& ph0, std::span<const double> times,
                                const EvolveOptions& options) {
    if (ph0.n_max() != spec.n_max) throw qmat::DimensionError("phonon state cutoff differs from the phonon spec");
    auto U = std::make_shared<const qmat::Propagator>(full_hamiltonian(delta, j, spec));
    const ReducedEvolution ea = evolve_reduced(rho_a, ph0, U, times, options);
    const ReducedEvolution eb = evolve_reduced(rho_b, ph0, U, times, options);

    WitnessResult out;
    out.times.assign(times.begin(), times.end());
    out.max_edge_population = std::max(ea.max_edge_population, eb.max_edge_population);
    for (std::size_t k = 0; k < times.size(); ++k) out.distance.push_back(qmat::trace_distance(ea.reduced[k], eb.reduced[k]));
    for (std::size_t k = 1; k < out.distance.size(); ++k)
        out.witness = std::max(out.witness, out.distance[k] - out.distance[k - 1]);
    return out;
}

} // namespace vibtrans::quantized
