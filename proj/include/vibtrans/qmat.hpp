// qmat.hpp: dense complex linear algebra for Hermitian dynamics
//
// Units: hbar = 1, energies in rad/ps, times in ps.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vibtrans::qmat {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a generator fails the Hermiticity check; carries the
/// relative defect max|H - H^dagger| / max|H|.
class NonHermitianError : public std::invalid_argument {
public:
    NonHermitianError(const std::string& what, double defect)
        : std::invalid_argument(what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

/// Relative Hermiticity defect; 0 for the zero matrix.
double hermiticity_defect(const ComplexMatrix& H);

/// Throws NonHermitianError if H is not square or its relative defect exceeds tol.
void require_hermitian(const ComplexMatrix& H, double tol = 1e-8);

struct EigenDecomposition {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // columns, unitary

    ComplexMatrix reconstruct() const;
    Eigen::Index dim() const { return eigenvalues.size(); }
};

EigenDecomposition hermitian_eigendecomposition(const ComplexMatrix& H);

/// exp(-i H t) through a cached eigendecomposition, so a whole time grid
/// costs one diagonalisation.
class Propagator {
public:
    explicit Propagator(const ComplexMatrix& H);
    explicit Propagator(EigenDecomposition spectrum);

    ComplexMatrix at(double t) const;
    ComplexVector apply(const ComplexVector& psi, double t) const;

    /// Coefficients in the eigenbasis, V^dagger psi. from_eigenbasis applies
    /// the diagonal phase e^{-i lambda t} and maps back.
    ComplexVector to_eigenbasis(const ComplexVector& psi) const;
    ComplexVector from_eigenbasis(const ComplexVector& coeffs, double t) const;

    const EigenDecomposition& spectrum() const noexcept { return spectrum_; }
    Eigen::Index dim() const noexcept { return spectrum_.dim(); }

private:
    EigenDecomposition spectrum_;
};

ComplexMatrix propagator(const ComplexMatrix& H, double t);

class DensityMatrix;

/// Normalised pure state; |norm - 1| <= 1e-10 is enforced on construction.
class StateVector {
public:
    explicit StateVector(ComplexVector amplitudes);

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    static StateVector normalized(ComplexVector amplitudes);
    static StateVector basis(Eigen::Index dim, Eigen::Index k);

    Eigen::Index dim() const noexcept { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
    Complex operator[](Eigen::Index k) const { return amplitudes_(k); }
    RealVector populations() const { return amplitudes_.cwiseAbs2(); }
    DensityMatrix projector() const;

private:
    ComplexVector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
public:
    /// Validates Hermiticity (1e-12), trace (1e-10) and positivity (-1e-10).
    explicit DensityMatrix(ComplexMatrix rho);

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix maximally_mixed(Eigen::Index dim);

    /// For results that are density matrices by construction (UρU†,
    /// partial traces of valid states). Only Hermiticity is symmetrised.
    static DensityMatrix trusted(ComplexMatrix rho);

    Eigen::Index dim() const noexcept { return rho_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return rho_; }
    double trace() const { return rho_.trace().real(); }
    double purity() const;
    RealVector populations() const { return rho_.diagonal().real(); }

private:
    struct TrustedTag {};
    DensityMatrix(ComplexMatrix rho, TrustedTag);
    ComplexMatrix rho_;
};

/// Populations on a time grid; row k holds |<i|psi(t_k)>|^2.
struct Trajectory {
    std::vector<double> times;
    RealMatrix populations;
    std::vector<double> energies; // <H> at each time

    std::size_t size() const noexcept { return times.size(); }
};

Trajectory trajectory(const StateVector& psi0, const ComplexMatrix& H, std::span<const double> times);
Trajectory trajectory(const StateVector& psi0, const Propagator& U, const ComplexMatrix& H,
                      std::span<const double> times);

/// Half the trace norm of rho1 - rho2.
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// Traces out the second tensor factor; basis index is s * phonon_dim + n.
DensityMatrix partial_trace_phonon(const DensityMatrix& full, Eigen::Index system_dim, Eigen::Index phonon_dim);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

/// max|U^dagger U - I|
double unitarity_defect(const ComplexMatrix& U);

/// Uniform grid 0, dt, 2dt, ... up to t_max (inclusive within 1e-9 dt).
std::vector<double> uniform_grid(double t_max, double dt);

} // namespace vibtrans::qmat
