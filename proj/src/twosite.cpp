#include "vibtrans/twosite.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

namespace vibtrans::twosite {

void TwoSiteParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(delta) || !finite(j) || !finite(g) || !finite(alpha) || !finite(omega))
        throw std::invalid_argument("two-site parameters must be finite");
    if (!(j > 0.0)) throw std::invalid_argument("two-site hopping j must be > 0");
    if (omega < 0.0) throw std::invalid_argument("phonon frequency omega must be >= 0");
    if (alpha < 0.0) throw std::invalid_argument("coherent amplitude alpha must be >= 0");
}

double transfer_probability(double j, double delta_eff) {
    if (j == 0.0 && delta_eff == 0.0) throw std::domain_error("transfer probability undefined for j = delta_eff = 0");
    const double j2 = j * j;
    return j2 / (j2 + delta_eff * delta_eff);
}

qmat::ComplexMatrix semiclassical_hamiltonian(const TwoSiteParams& p) {
    p.validate();
    const double d = p.effective_detuning();
    const double h = p.hopping();
    qmat::ComplexMatrix H(2, 2);
    H << d, h, h, -d;
    return H;
}

double resonance_alpha(double delta, double g) {
    if (g == 0.0) throw std::domain_error("no resonance: phonon coupling g is zero");
    return delta / g;
}

PeakTransfer first_population_peak(const qmat::ComplexMatrix& H, const qmat::StateVector& psi0, Eigen::Index target) {
    if (psi0.dim() != H.rows()) throw qmat::DimensionError("initial state and Hamiltonian dimensions differ");
    if (target < 0 || target >= H.rows()) throw qmat::DimensionError("target index out of range");

    const qmat::Propagator U(H);
    const qmat::ComplexVector coeffs = U.to_eigenbasis(psi0.amplitudes());
    const qmat::ComplexVector row = U.spectrum().eigenvectors.row(target).transpose();
    const qmat::RealVector& lambda = U.spectrum().eigenvalues;

    auto population = [&](double t) {
        qmat::Complex amp = 0.0;
        for (Eigen::Index k = 0; k < lambda.size(); ++k) amp += row(k) * std::polar(1.0, -lambda(k) * t) * coeffs(k);
        return std::norm(amp);
    };

    const double gap = lambda(lambda.size() - 1) - lambda(0);
    const double p0 = population(0.0);
    if (!(gap > 0.0)) return {p0, 0.0};

    const double step = std::numbers::pi / (gap * 64.0);
    constexpr long max_steps = 1'000'000;
    double cur = population(step);
    if (cur < p0) return {p0, 0.0};

    for (long k = 1; k < max_steps; ++k) {
        const double next = population(static_cast<double>(k + 1) * step);
        if (next < cur) {
            const double lo = static_cast<double>(k - 1) * step;
            const double hi = static_cast<double>(k + 1) * step;
            const auto [t_best, neg_p] = boost::math::tools::brent_find_minima(
                [&](double t) { return -population(t); }, lo, hi, std::numeric_limits<double>::digits / 2);
            if (-neg_p >= cur) return {-neg_p, t_best};
            return {cur, static_cast<double>(k) * step};
        }
        cur = next;
    }
    throw std::runtime_error("no population maximum found within the scan window");
}

PeakTransfer peak_transfer(const TwoSiteParams& p) {
    return first_population_peak(semiclassical_hamiltonian(p), qmat::StateVector::basis(2, 0), 1);
}

double residual_detuning(double g, double alpha, double omega, double j) {
    if (!(j > 0.0)) throw std::invalid_argument("residual detuning requires j > 0");
    return g * alpha * omega * omega / (j * j);
}

qmat::Trajectory trajectory(const TwoSiteParams& p, std::span<const double> times) {
    return qmat::trajectory(qmat::StateVector::basis(2, 0), semiclassical_hamiltonian(p), times);
}

} // namespace vibtrans::twosite
