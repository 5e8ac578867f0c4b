#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qincompat/errors.hpp"
#include "qincompat/numerics.hpp"

namespace qincompat {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Complex = std::complex<double>;

// Hermitian matrix with symmetrization enforced at construction. Asymmetry up
// to hermiticity_silent_tol is silently averaged away; larger asymmetry up to
// hermiticity_error_tol is still symmetrized; beyond that it is rejected.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(const ComplexMatrix& m);
    HermitianMatrix(Eigen::Index dim) : m_(ComplexMatrix::Zero(dim, dim)) {}

    const ComplexMatrix& mat() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

  private:
    ComplexMatrix m_;
};

struct EigenDecomposition {
    RealVector eigenvalues;    // ascending
    ComplexMatrix eigenvectors;  // unitary, columns matched to eigenvalues
};

namespace matcore {

// Pauli matrices and friends, used all over the test corpus and the models.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix identity(Eigen::Index d);

EigenDecomposition eig_hermitian(const HermitianMatrix& m);

// Spectral power V diag(lambda^p) V^dag. Eigenvalues within the clamp band
// below zero are set to zero first; a genuinely negative or (for p < 0)
// singular spectrum is an error.
HermitianMatrix psd_power(const HermitianMatrix& m, double p);

// Largest singular value.
double operator_norm(const ComplexMatrix& m);

// Tr|sqrt(G) R sqrt(G)| for G >= 0, R Hermitian.
double trace_abs(const HermitianMatrix& g, const HermitianMatrix& r);

// exp(i H); unitary for Hermitian H.
ComplexMatrix expm_i(const HermitianMatrix& h);

// Integral of e^{-isH} K e^{isH} over s in [0,1]. In the eigenbasis of H the
// (a,b) entry of K picks up phi(i(eps_b - eps_a)) with phi(z) = (e^z - 1)/z.
// This is the derivative transform of the encoding: d/dtheta_j exp(iH(theta))
// = exp(iH) * i * averaged_conjugation(H, H_j).
HermitianMatrix averaged_conjugation(const HermitianMatrix& h, const HermitianMatrix& k);

// phi(z) = (e^z - 1)/z with a Taylor branch near zero.
Complex phi_divided_difference(Complex z);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Trace over one tensor factor. dims lists the local dimensions in order,
// site is the 0-based factor to remove.
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<Eigen::Index>& dims,
                            std::size_t site);

// Uhlmann fidelity [Tr sqrt(sqrt(rho) sigma sqrt(rho))]^2 of two density matrices.
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

}  // namespace matcore
}  // namespace qincompat
