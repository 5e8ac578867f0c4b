#pragma once

#include <optional>

#include "qincompat/estimation.hpp"
#include "qincompat/sdp.hpp"

namespace qincompat::holevo {

using estimation::InfoBundle;
using estimation::WeightMatrix;
using model::DensityMatrix;
using model::EncodedModel;

// Ingredients of the Holevo-bound semidefinite program: an orthonormal
// Hermitian operator basis, a thin factor R with R^dag R = rho, and the matrix
// of basis components of the state derivatives.
struct HolevoAssembly {
    std::vector<ComplexMatrix> basis;  // d~ = D^2 elements, Tr[b_j b_k] = delta_jk
    ComplexMatrix r_factor;            // r x D, rows sqrt(p_a) <a|
    int rank = 0;
    RealMatrix dsdtheta;               // d~ x d, entries Tr[b_k drho_j]
    RealVector state_components;       // d~ entries Tr[b_k rho]
};

// Orthonormal Hermitian basis of D x D matrices: identity/sqrt(D) first, then
// the generalized Gell-Mann elements (all traceless).
std::vector<ComplexMatrix> hermitian_basis(Eigen::Index dim);

// Thin spectral factor of a density matrix: rows sqrt(p_a) <a| over the
// eigenvalues above the support cut, largest first.
std::pair<ComplexMatrix, int> r_factor(const DensityMatrix& rho);

HolevoAssembly assemble(const EncodedModel& enc);

struct HolevoOptions {
    sdp::SolveOptions sdp;
    // Pin Tr[rho X_i] = 0. The optimum is flat along mean shifts, so this only
    // removes degeneracy of the solution set; see the regression test.
    bool mean_zero_rows = true;
};

struct HolevoResult {
    double c_h = 0.0;
    RealMatrix x_star;  // d~ x d optimal estimator coefficients
    sdp::Status status = sdp::Status::NumericalFailure;
    double duality_gap = 0.0;
    int iterations = 0;
};

// The Holevo-Cramer-Rao bound C_H(G) by semidefinite programming:
// minimize Tr[G V] over V and locally unbiased estimator coefficients X with
// [[V, (RX)^dag], [RX, 1]] >= 0.
HolevoResult holevo_bound(const WeightMatrix& g, const EncodedModel& enc,
                          const HolevoOptions& opts = {});

struct IncompatReport {
    double c_s_identity = 0.0;
    double c_h_identity = 0.0;
    double c_z_identity = 0.0;
    double r = 1.0;
    double incompatibility = 0.0;  // r - 1
    double istar = 0.0;
    double separable_bound = 0.0;
    bool separable_exact = false;
    sdp::Status sdp_status = sdp::Status::NumericalFailure;
    double sdp_gap = 0.0;
    int sdp_iterations = 0;
};

// The incompatibility figure r = sup_G C_H(G)/C_S(G) as a single SDP: the
// supremum over normalized weights is the spectral norm of F^1/2 V F^1/2,
// handled by a symmetric 2x2-block Schur-complement epigraph.
IncompatReport r_figure(const EncodedModel& enc, const HolevoOptions& opts = {});

}  // namespace qincompat::holevo
