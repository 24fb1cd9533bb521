#include "vibtrans/qmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vibtrans::qmat {

double hermiticity_defect(const ComplexMatrix& H) {
    if (H.rows() != H.cols()) return std::numeric_limits<double>::infinity();
    if (H.size() == 0) return 0.0;
    const double scale = H.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (H - H.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void require_hermitian(const ComplexMatrix& H, double tol) {
    if (H.rows() != H.cols()) {
        std::ostringstream os;
        os << "matrix is not square (" << H.rows() << "x" << H.cols() << ")";
        throw NonHermitianError(os.str(), std::numeric_limits<double>::infinity());
    }
    if (H.size() == 0) throw DimensionError("empty matrix");
    const double defect = hermiticity_defect(H);
    if (!(defect <= tol)) {
        std::ostringstream os;
        os << "matrix is not Hermitian: max|H - H^dagger| / max|H| = " << defect << " exceeds " << tol;
        throw NonHermitianError(os.str(), defect);
    }
}

ComplexMatrix EigenDecomposition::reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& H) {
    require_hermitian(H);
    const ComplexMatrix sym = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Propagator::Propagator(const ComplexMatrix& H) : spectrum_(hermitian_eigendecomposition(H)) {}

Propagator::Propagator(EigenDecomposition spectrum) : spectrum_(std::move(spectrum)) {}

namespace {

ComplexVector phases(const RealVector& eigenvalues, double t) {
    ComplexVector out(eigenvalues.size());
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) out(k) = std::polar(1.0, -eigenvalues(k) * t);
    return out;
}

} // namespace

ComplexMatrix Propagator::at(double t) const {
    if (!std::isfinite(t)) throw std::invalid_argument("propagation time must be finite");
    const ComplexVector ph = phases(spectrum_.eigenvalues, t);
    const ComplexMatrix& V = spectrum_.eigenvectors;
    return (V * ph.asDiagonal()) * V.adjoint();
}

ComplexVector Propagator::to_eigenbasis(const ComplexVector& psi) const {
    if (psi.size() != dim()) throw DimensionError("state dimension does not match propagator");
    return spectrum_.eigenvectors.adjoint() * psi;
}

ComplexVector Propagator::from_eigenbasis(const ComplexVector& coeffs, double t) const {
    const ComplexVector ph = phases(spectrum_.eigenvalues, t);
    return spectrum_.eigenvectors * ph.cwiseProduct(coeffs);
}

ComplexVector Propagator::apply(const ComplexVector& psi, double t) const {
    return from_eigenbasis(to_eigenbasis(psi), t);
}

ComplexMatrix propagator(const ComplexMatrix& H, double t) {
    return Propagator(H).at(t);
}

// --- states -----------------------------------------------------------------

StateVector::StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) throw DimensionError("state vector must have positive dimension");
    const double norm = amplitudes_.norm();
    if (!(std::abs(norm - 1.0) <= 1e-10)) {
        std::ostringstream os;
        os << "state vector is not normalised: |psi| = " << norm;
        throw std::invalid_argument(os.str());
    }
}

StateVector StateVector::normalized(ComplexVector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("cannot normalise a zero state");
    return StateVector(amplitudes / norm);
}

StateVector StateVector::basis(Eigen::Index dim, Eigen::Index k) {
    if (dim <= 0 || k < 0 || k >= dim) throw DimensionError("basis index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return StateVector(std::move(v));
}

DensityMatrix StateVector::projector() const {
    return DensityMatrix::pure(*this);
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) throw DimensionError("density matrix must be square and non-empty");
    const double asym = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (!(asym <= 1e-12)) {
        std::ostringstream os;
        os << "density matrix is not Hermitian: max|rho - rho^dagger| = " << asym;
        throw std::invalid_argument(os.str());
    }
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
    const double tr = rho_.trace().real();
    if (!(std::abs(tr - 1.0) <= 1e-10)) {
        std::ostringstream os;
        os << "density matrix trace is " << tr << ", expected 1";
        throw std::invalid_argument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_, Eigen::EigenvaluesOnly);
    const double smallest = solver.eigenvalues()(0);
    if (!(smallest >= -1e-10)) {
        std::ostringstream os;
        os << "density matrix is not positive semidefinite: smallest eigenvalue " << smallest;
        throw std::invalid_argument(os.str());
    }
}

DensityMatrix::DensityMatrix(ComplexMatrix rho, TrustedTag) : rho_(std::move(rho)) {
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix rho) {
    if (rho.rows() == 0 || rho.rows() != rho.cols()) throw DimensionError("density matrix must be square and non-empty");
    return DensityMatrix(std::move(rho), TrustedTag{});
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    const ComplexVector& v = psi.amplitudes();
    return DensityMatrix(v * v.adjoint(), TrustedTag{});
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
    if (dim <= 0) throw DimensionError("dimension must be positive");
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), TrustedTag{});
}

double DensityMatrix::purity() const {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return rho_.cwiseAbs2().sum();
}

// --- dynamics ---------------------------------------------------------------

Trajectory trajectory(const StateVector& psi0, const ComplexMatrix& H, std::span<const double> times) {
    if (psi0.dim() != H.rows()) throw DimensionError("initial state and Hamiltonian dimensions differ");
    return trajectory(psi0, Propagator(H), H, times);
}

Trajectory trajectory(const StateVector& psi0, const Propagator& U, const ComplexMatrix& H,
                      std::span<const double> times) {
    if (psi0.dim() != U.dim() || H.rows() != U.dim()) throw DimensionError("initial state and Hamiltonian dimensions differ");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!std::isfinite(times[k])) throw std::invalid_argument("time grid contains non-finite values");
        if (k == 0 && times[k] < 0.0) throw std::invalid_argument("time grid must start at t >= 0");
        if (k > 0 && !(times[k] > times[k - 1])) throw std::invalid_argument("time grid must be strictly ascending");
    }

    Trajectory out;
    out.times.assign(times.begin(), times.end());
    out.populations.resize(static_cast<Eigen::Index>(times.size()), psi0.dim());
    out.energies.reserve(times.size());

    const ComplexVector coeffs = U.to_eigenbasis(psi0.amplitudes());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const ComplexVector psi = U.from_eigenbasis(coeffs, times[k]);
        out.populations.row(static_cast<Eigen::Index>(k)) = psi.cwiseAbs2().transpose();
        out.energies.push_back(psi.dot(H * psi).real());
    }
    return out;
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    if (rho1.dim() != rho2.dim()) throw DimensionError("trace distance of density matrices with different dimensions");
    const ComplexMatrix diff = rho1.matrix() - rho2.matrix();
    if (diff.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const EigenDecomposition eig = hermitian_eigendecomposition(diff);
    const double d = 0.5 * eig.eigenvalues.cwiseAbs().sum();
    return std::clamp(d, 0.0, 1.0);
}

DensityMatrix partial_trace_phonon(const DensityMatrix& full, Eigen::Index system_dim, Eigen::Index phonon_dim) {
    if (system_dim <= 0 || phonon_dim <= 0 || full.dim() != system_dim * phonon_dim) {
        std::ostringstream os;
        os << "cannot factor dimension " << full.dim() << " as " << system_dim << " x " << phonon_dim;
        throw DimensionError(os.str());
    }
    const ComplexMatrix& rho = full.matrix();
    ComplexMatrix red = ComplexMatrix::Zero(system_dim, system_dim);
    for (Eigen::Index s = 0; s < system_dim; ++s)
        for (Eigen::Index r = 0; r < system_dim; ++r)
            red(s, r) = rho.block(s * phonon_dim, r * phonon_dim, phonon_dim, phonon_dim).trace();
    return DensityMatrix::trusted(std::move(red));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

double unitarity_defect(const ComplexMatrix& U) {
    return (U.adjoint() * U - ComplexMatrix::Identity(U.cols(), U.cols())).cwiseAbs().maxCoeff();
}

std::vector<double> uniform_grid(double t_max, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt) || !(t_max >= 0.0) || !std::isfinite(t_max))
        throw std::invalid_argument("time grid requires dt > 0 and t_max >= 0");
    const auto steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    std::vector<double> grid(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) grid[k] = static_cast<double>(k) * dt;
    return grid;
}

} // namespace vibtrans::qmat
