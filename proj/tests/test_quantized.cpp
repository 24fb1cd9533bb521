#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vibtrans/quantized.hpp"

using namespace vibtrans;
using namespace vibtrans::quantized;

namespace {

qmat::DensityMatrix plus() {
    return qmat::StateVector::normalized(qmat::ComplexVector::Constant(2, 1.0)).projector();
}

qmat::DensityMatrix minus() {
    qmat::ComplexVector v(2);
    v << 1.0, -1.0;
    return qmat::StateVector::normalized(v).projector();
}

PhononSpec spec(double omega, double g, int n_max) {
    PhononSpec s;
    s.omega = omega;
    s.g = g;
    s.n_max = n_max;
    return s;
}

// |<beta_a(t)|beta_d(t)>| for the pure-dephasing model (J = 0): the two
// displaced centres differ by (g/omega)(1 - e^{-i omega t}).
double dephasing_distance(double g, double omega, double t) {
    return std::exp(-(g / omega) * (g / omega) * (1.0 - std::cos(omega * t)));
}

} // namespace

TEST(Quantized, CoherentCutoffRule) {
    EXPECT_EQ(coherent_cutoff(0.0), 10);
    EXPECT_EQ(coherent_cutoff(10.0), 210);
    EXPECT_EQ(coherent_cutoff(2.5), 42);
    EXPECT_THROW(coherent_cutoff(-1.0), std::invalid_argument);
}

TEST(Quantized, CoherentStateMoments) {
    for (double alpha : {0.0, 0.5, 3.0, 10.0}) {
        const PhononState s = coherent_state(alpha, coherent_cutoff(alpha));
        EXPECT_NEAR(s.mean_number(), alpha * alpha, 1e-6 * std::max(1.0, alpha * alpha));
        EXPECT_NEAR(s.density().trace(), 1.0, 1e-12);
        EXPECT_NEAR(s.density().purity(), 1.0, 1e-12);
        EXPECT_LT(s.truncation_deficit(), 1e-8);
    }
}

TEST(Quantized, CoherentStateAmplitudesArePoissonian) {
    const double alpha = 1.7;
    const PhononState s = coherent_state(alpha, 40);
    const qmat::RealVector p = s.density().populations();
    double fact = 1.0;
    for (int n = 0; n < 10; ++n) {
        if (n > 0) fact *= n;
        EXPECT_NEAR(p(n), std::exp(-alpha * alpha) * std::pow(alpha * alpha, n) / fact, 1e-13);
    }
}

TEST(Quantized, CoherentStateTruncationNamesRequiredCutoff) {
    try {
        coherent_state(10.0, 50);
        FAIL() << "expected TruncationError";
    } catch (const TruncationError& e) {
        EXPECT_EQ(e.required_n_max(), 210);
    }
}

TEST(Quantized, DisplacedThermalMomentsAndPurity) {
    const double alpha = 2.0, nbar = 0.5;
    const PhononState s = displaced_thermal_state(alpha, nbar, displaced_thermal_cutoff(alpha, nbar));
    EXPECT_NEAR(s.mean_number(), alpha * alpha + nbar, 1e-6 * (alpha * alpha + nbar));
    EXPECT_NEAR(s.density().trace(), 1.0, 1e-12);
    EXPECT_NEAR(s.density().purity(), 1.0 / (2.0 * nbar + 1.0), 1e-8);
}

TEST(Quantized, DisplacedThermalWithZeroTemperatureIsCoherent) {
    const PhononState a = displaced_thermal_state(1.5, 0.0, 40);
    const PhononState b = coherent_state(1.5, 40);
    EXPECT_LT(qmat::trace_distance(a.density(), b.density()), 1e-10);
}

TEST(Quantized, NumberState) {
    const PhononState s = number_state(3, 10);
    EXPECT_DOUBLE_EQ(s.mean_number(), 3.0);
    EXPECT_THROW(number_state(11, 10), TruncationError);
    EXPECT_THROW(number_state(-1, 10), std::invalid_argument);
}

TEST(Quantized, EnsembleReconstructsDensity) {
    const PhononState s = displaced_thermal_state(1.0, 0.8, displaced_thermal_cutoff(1.0, 0.8));
    const Ensemble e = ensemble_of(s.density());
    qmat::ComplexMatrix rho = qmat::ComplexMatrix::Zero(s.density().dim(), s.density().dim());
    double wsum = 0.0;
    for (std::size_t k = 0; k < e.states.size(); ++k) {
        rho += e.weights[k] * e.states[k] * e.states[k].adjoint();
        wsum += e.weights[k];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    EXPECT_LT((rho - s.density().matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quantized, HamiltonianStructure) {
    const PhononSpec s = spec(0.3, 0.7, 6);
    const qmat::ComplexMatrix H = full_hamiltonian(0.4, 1.1, s);
    ASSERT_EQ(H.rows(), 14);
    EXPECT_EQ(qmat::hermiticity_defect(H), 0.0);
    // g = 0 decouples into (delta sz + J sx) (x) I + I (x) omega n
    const qmat::ComplexMatrix H0 = full_hamiltonian(0.4, 1.1, spec(0.3, 0.0, 6));
    qmat::ComplexMatrix n = qmat::ComplexMatrix::Zero(7, 7);
    for (int k = 0; k < 7; ++k) n(k, k) = k;
    const qmat::ComplexMatrix sys = 0.4 * qmat::pauli_z() + 1.1 * qmat::pauli_x();
    const qmat::ComplexMatrix mode = 0.3 * n;
    const qmat::ComplexMatrix expected = qmat::kron(sys, qmat::ComplexMatrix(qmat::ComplexMatrix::Identity(7, 7))) +
                                         qmat::kron(qmat::ComplexMatrix(qmat::ComplexMatrix::Identity(2, 2)), mode);
    EXPECT_LT((H0 - expected).cwiseAbs().maxCoeff(), 1e-15);
    // coupling -(g/2) sz (a + a^dagger): <d,0|H|d,1> = -g/2, <a,0|H|a,1> = +g/2
    EXPECT_NEAR(H(0, 1).real(), -0.35, 1e-15);
    EXPECT_NEAR(H(7, 8).real(), 0.35, 1e-15);
    EXPECT_NEAR(H(2, 3).real(), -0.35 * std::sqrt(3.0), 1e-15);
    EXPECT_THROW(full_hamiltonian(0.0, 1.0, spec(1.0, 1.0, 0)), std::invalid_argument);
}

TEST(Quantized, ReducedDynamicsWithoutCouplingIsTwoSiteRabi) {
    twosite::TwoSiteParams p;
    p.delta = 0.5;
    p.j = 1.0;
    const PhononSpec s = spec(0.2, 0.0, 12);
    const std::vector<double> t = qmat::uniform_grid(6.0, 0.05);
    const ReducedEvolution q =
        evolve_reduced(qmat::StateVector::basis(2, 0), coherent_state(1.0, 12), full_hamiltonian(0.5, 1.0, s), t);
    const qmat::Trajectory sc = twosite::trajectory(p, t);
    EXPECT_LT((q.populations.populations - sc.populations).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(q.truncation_ok);
}

TEST(Quantized, ReducedStatesAreValidDensityMatrices) {
    const PhononSpec s = spec(0.1, 0.3, 40);
    const std::vector<double> t = qmat::uniform_grid(5.0, 0.5);
    const ReducedEvolution q = evolve_reduced(qmat::StateVector::basis(2, 0), displaced_thermal_state(1.0, 0.3, 40),
                                              full_hamiltonian(0.3, 1.0, s), t);
    for (const auto& rho : q.reduced) {
        EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
        EXPECT_LE(rho.purity(), 1.0 + 1e-12);
        EXPECT_NO_THROW(qmat::DensityMatrix(rho.matrix()));
    }
}

TEST(Quantized, LeakageIntoCutoffIsReported) {
    // strong coupling displaces the mode by up to 2 g / omega = 16
    const PhononSpec s = spec(0.5, 4.0, 12);
    const std::vector<double> t = qmat::uniform_grid(10.0, 0.1);
    const qmat::ComplexMatrix H = full_hamiltonian(0.0, 0.0, s);
    EXPECT_THROW(evolve_reduced(qmat::StateVector::basis(2, 0), coherent_state(0.0, 12), H, t), TruncationError);
    EvolveOptions opts;
    opts.allow_leakage = true;
    const ReducedEvolution q = evolve_reduced(qmat::StateVector::basis(2, 0), coherent_state(0.0, 12), H, t, opts);
    EXPECT_FALSE(q.truncation_ok);
    EXPECT_GT(q.max_edge_population, 1e-6);
}

TEST(Quantized, PureDephasingDistanceMatchesAnalyticDecay) {
    const double g = 1.0, omega = 0.5;
    const PhononSpec s = spec(omega, g, 80);
    const std::vector<double> t = qmat::uniform_grid(30.0, 0.25);
    const WitnessResult w = nonmarkov_witness(0.0, 0.0, s, plus(), minus(), coherent_state(2.0, 80), t);
    double oracle_witness = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        EXPECT_NEAR(w.distance[k], dephasing_distance(g, omega, t[k]), 1e-9) << "t = " << t[k];
        if (k > 0)
            oracle_witness = std::max(oracle_witness,
                                      dephasing_distance(g, omega, t[k]) - dephasing_distance(g, omega, t[k - 1]));
    }
    EXPECT_NEAR(w.witness, oracle_witness, 1e-9);
    EXPECT_GE(w.witness, 0.05);
}

TEST(Quantized, WitnessVanishesWithoutCoupling) {
    const PhononSpec s = spec(0.5, 0.0, 40);
    const std::vector<double> t = qmat::uniform_grid(30.0, 0.25);
    const WitnessResult w = nonmarkov_witness(0.0, 0.0, s, plus(), minus(), coherent_state(2.0, 40), t);
    EXPECT_LE(w.witness, 1e-12);
}

TEST(Quantized, WitnessIsNonNegativeAndDistanceBounded) {
    const PhononSpec s = spec(0.4, 0.6, 60);
    const std::vector<double> t = qmat::uniform_grid(20.0, 0.2);
    const WitnessResult w = nonmarkov_witness(0.3, 1.0, s, plus(), minus(), coherent_state(1.5, 60), t);
    EXPECT_GE(w.witness, 0.0);
    for (double d : w.distance) {
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0 + 1e-12);
    }
}

TEST(Quantized, WitnessRejectsMismatchedCutoff) {
    const std::vector<double> t{0.0, 1.0};
    EXPECT_THROW(nonmarkov_witness(0.0, 1.0, spec(0.5, 1.0, 20), plus(), minus(), coherent_state(1.0, 30), t),
                 qmat::DimensionError);
}

TEST(Quantized, SemiclassicalDeviationSmallForWeakCoupling) {
    twosite::TwoSiteParams p;
    p.delta = 0.5;
    p.j = 1.0;
    p.g = 0.1;
    p.alpha = 5.0;
    p.omega = 0.01;
    const PhononSpec s = spec(0.01, 0.1, coherent_cutoff(5.0));
    const DeviationResult d = semiclassical_deviation(p, s, std::numbers::pi, 201);
    EXPECT_LT(d.max_deviation, 0.02);
    EXPECT_EQ(d.times.size(), 201u);
    EXPECT_DOUBLE_EQ(d.times.back(), std::numbers::pi);
}

TEST(Quantized, SemiclassicalDeviationArgumentChecks) {
    twosite::TwoSiteParams p;
    p.delta = 1.0;
    p.j = 1.0;
    p.g = 0.1;
    p.alpha = 10.0;
    p.omega = 0.01;
    const PhononSpec s = spec(0.01, 0.1, 210);
    EXPECT_THROW(semiclassical_deviation(p, s, 1.0), std::invalid_argument);
    PhononSpec other = s;
    other.g = 0.2;
    EXPECT_THROW(semiclassical_deviation(p, other, 4.0), std::invalid_argument);
    p.convention = twosite::Convention::DoubledHopping;
    EXPECT_THROW(semiclassical_deviation(p, s, 4.0), std::invalid_argument);
}

TEST(Quantized, EvolutionConservesFullStateDistance) {
    const PhononSpec s = spec(0.3, 0.5, 30);
    auto U = std::make_shared<const qmat::Propagator>(full_hamiltonian(0.2, 1.0, s));
    const PhononState ph = coherent_state(1.0, 30);
    const Ensemble ea = product_ensemble(ensemble_of(plus()), ph.ensemble());
    const Ensemble eb = product_ensemble(ensemble_of(minus()), ph.ensemble());
    const CoupledEvolution a(U, 2, 31, ea), b(U, 2, 31, eb);
    const double d0 = qmat::trace_distance(a.full_state(0.0), b.full_state(0.0));
    for (double t : {1.0, 5.0, 12.0}) EXPECT_NEAR(qmat::trace_distance(a.full_state(t), b.full_state(t)), d0, 1e-10);
}
