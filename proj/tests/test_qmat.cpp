#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vibtrans/qmat.hpp"

using namespace vibtrans::qmat;

namespace {

ComplexMatrix random_hermitian(Eigen::Index n, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
    return 0.5 * (a + a.adjoint());
}

ComplexVector random_state(Eigen::Index n, std::mt19937& rng) {
    std::normal_distribution<double> nd;
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
    return v.normalized();
}

} // namespace

TEST(Qmat, EigendecompositionReconstructsRandomHermitian) {
    std::mt19937 rng(7);
    for (Eigen::Index n : {1, 2, 7, 30}) {
        const ComplexMatrix H = random_hermitian(n, rng);
        const EigenDecomposition e = hermitian_eigendecomposition(H);
        EXPECT_LT((e.reconstruct() - H).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()));
        EXPECT_LT(unitarity_defect(e.eigenvectors), 1e-12);
        for (Eigen::Index k = 1; k < n; ++k) EXPECT_LE(e.eigenvalues(k - 1), e.eigenvalues(k));
    }
}

TEST(Qmat, RejectsNonHermitian) {
    ComplexMatrix H(2, 2);
    H << 1.0, 2.0, 0.0, 1.0;
    EXPECT_THROW(require_hermitian(H), NonHermitianError);
    try {
        hermitian_eigendecomposition(H);
        FAIL();
    } catch (const NonHermitianError& e) {
        EXPECT_GT(e.defect(), 0.5);
    }
    EXPECT_THROW(require_hermitian(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST(Qmat, HermiticityDefectOfZeroMatrixIsZero) {
    EXPECT_EQ(hermiticity_defect(ComplexMatrix::Zero(3, 3)), 0.0);
}

TEST(Qmat, TwoLevelPropagatorMatchesRabiFormula) {
    // exp(-i (a sz + b sx) t) = cos(rt) I - i sin(rt)/r (a sz + b sx)
    const double a = 0.7, b = 1.3, r = std::hypot(a, b);
    const ComplexMatrix H = a * pauli_z() + b * pauli_x();
    for (double t : {0.0, 0.1, 1.0, 17.3}) {
        const ComplexMatrix expected =
            std::cos(r * t) * ComplexMatrix::Identity(2, 2) - Complex(0, std::sin(r * t) / r) * H;
        EXPECT_LT((propagator(H, t) - expected).cwiseAbs().maxCoeff(), 1e-13) << "t = " << t;
    }
}

TEST(Qmat, PropagatorIsUnitaryAndComposes) {
    std::mt19937 rng(11);
    const ComplexMatrix H = random_hermitian(12, rng);
    const Propagator U(H);
    for (double t : {0.3, 2.0, 40.0}) EXPECT_LT(unitarity_defect(U.at(t)), 1e-12);
    EXPECT_LT((U.at(0.7) * U.at(1.1) - U.at(1.8)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((U.at(0.0) - ComplexMatrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-13);
    const ComplexVector psi = random_state(12, rng);
    EXPECT_LT((U.apply(psi, 0.9) - U.at(0.9) * psi).norm(), 1e-12);
    EXPECT_LT((U.from_eigenbasis(U.to_eigenbasis(psi), 0.9) - U.apply(psi, 0.9)).norm(), 1e-12);
}

TEST(Qmat, PropagatorFromHamiltonianSeriesForSmallTime) {
    std::mt19937 rng(5);
    const ComplexMatrix H = random_hermitian(5, rng);
    const double t = 1e-3;
    const ComplexMatrix I = ComplexMatrix::Identity(5, 5);
    const Complex mi(0, -1);
    const ComplexMatrix series = I + mi * t * H + 0.5 * mi * mi * t * t * H * H + mi * mi * mi * t * t * t / 6.0 * H * H * H;
    EXPECT_LT((propagator(H, t) - series).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Qmat, StateVectorValidatesNorm) {
    EXPECT_THROW(StateVector(ComplexVector::Constant(2, 1.0)), std::invalid_argument);
    const StateVector s = StateVector::normalized(ComplexVector::Constant(4, Complex(2.0, 1.0)));
    EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
    EXPECT_THROW(StateVector::normalized(ComplexVector::Zero(3)), std::invalid_argument);
    EXPECT_THROW(StateVector::basis(3, 3), std::invalid_argument);
    EXPECT_EQ(StateVector::basis(3, 1).populations()(1), 1.0);
}

TEST(Qmat, DensityMatrixValidation) {
    ComplexMatrix bad_trace = ComplexMatrix::Identity(2, 2);
    EXPECT_THROW(DensityMatrix{bad_trace}, std::invalid_argument);
    ComplexMatrix negative(2, 2);
    negative << 1.5, 0.0, 0.0, -0.5;
    EXPECT_THROW(DensityMatrix{negative}, std::invalid_argument);
    ComplexMatrix non_herm(2, 2);
    non_herm << 0.5, 0.1, 0.0, 0.5;
    EXPECT_THROW(DensityMatrix{non_herm}, std::invalid_argument);
    EXPECT_NEAR(DensityMatrix::maximally_mixed(4).purity(), 0.25, 1e-15);
    EXPECT_NEAR(StateVector::basis(3, 0).projector().purity(), 1.0, 1e-15);
}

TEST(Qmat, TraceDistancePureStateFormula) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexVector a = random_state(4, rng), b = random_state(4, rng);
        const double expected = std::sqrt(1.0 - std::norm(a.dot(b)));
        const double d = trace_distance(StateVector(a).projector(), StateVector(b).projector());
        EXPECT_NEAR(d, expected, 1e-12);
        EXPECT_NEAR(d, trace_distance(StateVector(b).projector(), StateVector(a).projector()), 1e-14);
    }
}

TEST(Qmat, TraceDistanceBounds) {
    const DensityMatrix r = StateVector::basis(2, 0).projector();
    EXPECT_EQ(trace_distance(r, r), 0.0);
    EXPECT_NEAR(trace_distance(r, StateVector::basis(2, 1).projector()), 1.0, 1e-15);
    EXPECT_NEAR(trace_distance(r, DensityMatrix::maximally_mixed(2)), 0.5, 1e-15);
    EXPECT_THROW(trace_distance(r, DensityMatrix::maximally_mixed(3)), DimensionError);
}

TEST(Qmat, TraceDistanceInvariantUnderUnitary) {
    std::mt19937 rng(21);
    const ComplexMatrix H = random_hermitian(6, rng);
    const ComplexMatrix U = propagator(H, 1.7);
    const ComplexVector a = random_state(6, rng), b = random_state(6, rng);
    const double before = trace_distance(StateVector(a).projector(), StateVector(b).projector());
    const ComplexVector ua = U * a, ub = U * b;
    const double after = trace_distance(StateVector::normalized(ua).projector(), StateVector::normalized(ub).projector());
    EXPECT_NEAR(before, after, 1e-12);
}

TEST(Qmat, PartialTraceOfProductState) {
    std::mt19937 rng(4);
    const ComplexVector s = random_state(2, rng), p = random_state(5, rng);
    const DensityMatrix full = StateVector(kron(s, p)).projector();
    const DensityMatrix red = partial_trace_phonon(full, 2, 5);
    EXPECT_LT((red.matrix() - s * s.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(partial_trace_phonon(full, 3, 5), DimensionError);
}

TEST(Qmat, KronLayout) {
    ComplexMatrix a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 0, 1, 1, 0;
    const ComplexMatrix k = kron(a, b);
    EXPECT_EQ(k.rows(), 4);
    EXPECT_EQ(k(0, 1), Complex(1.0));
    EXPECT_EQ(k(1, 2), Complex(2.0));
    EXPECT_EQ(k(3, 0), Complex(3.0));
    EXPECT_EQ(k(3, 1), Complex(0.0));
    EXPECT_EQ(k(2, 1), Complex(3.0));
}

TEST(Qmat, PauliAlgebra) {
    const ComplexMatrix I = ComplexMatrix::Identity(2, 2);
    EXPECT_LT((pauli_x() * pauli_x() - I).norm(), 1e-15);
    EXPECT_LT((pauli_x() * pauli_y() - Complex(0, 1) * pauli_z()).norm(), 1e-15);
}

TEST(Qmat, TrajectoryConservesNormAndEnergy) {
    std::mt19937 rng(9);
    const ComplexMatrix H = random_hermitian(8, rng);
    const StateVector psi(random_state(8, rng));
    const std::vector<double> t = uniform_grid(5.0, 0.05);
    const Trajectory tr = trajectory(psi, H, t);
    ASSERT_EQ(tr.size(), t.size());
    for (std::size_t k = 0; k < tr.size(); ++k) {
        EXPECT_NEAR(tr.populations.row(static_cast<Eigen::Index>(k)).sum(), 1.0, 1e-12);
        EXPECT_NEAR(tr.energies[k], tr.energies[0], 1e-12 * std::max(1.0, std::abs(tr.energies[0])));
    }
}

TEST(Qmat, TrajectoryRejectsBadGrids) {
    const ComplexMatrix H = pauli_x();
    const StateVector psi = StateVector::basis(2, 0);
    const std::vector<double> descending{1.0, 0.5};
    EXPECT_THROW(trajectory(psi, H, descending), std::invalid_argument);
    const std::vector<double> negative{-1.0, 0.0};
    EXPECT_THROW(trajectory(psi, H, negative), std::invalid_argument);
    EXPECT_THROW(trajectory(StateVector::basis(3, 0), H, std::vector<double>{0.0}), DimensionError);
}

TEST(Qmat, UniformGridIncludesEndpoint) {
    const auto g = uniform_grid(1.0, 0.1);
    ASSERT_EQ(g.size(), 11u);
    EXPECT_DOUBLE_EQ(g.back(), 1.0);
    EXPECT_EQ(uniform_grid(220.0, 1.0).size(), 221u);
    EXPECT_THROW(uniform_grid(1.0, 0.0), std::invalid_argument);
}
