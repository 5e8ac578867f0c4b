#pragma once

#include <vector>

#include "qincompat/model.hpp"

namespace qincompat::estimation {

using model::DensityMatrix;
using model::EncodedModel;

// SLDs with the two d x d information matrices derived from them:
// F_ij = Tr[rho {L_i, L_j}]/2 (symmetric PSD) and
// A_ij = Tr[rho [L_i, L_j]]/(2i) (antisymmetric).
struct InfoBundle {
    std::vector<HermitianMatrix> slds;
    RealMatrix fisher;       // F
    RealMatrix commutator;   // A
    int support_rank = 0;
    bool fisher_singular = false;  // lambda_min(F) <= singular_fisher_rel * ||F||

    int parameter_count() const { return static_cast<int>(fisher.rows()); }
    void require_nonsingular() const;
};

// PSD weight matrix G over parameter space.
class WeightMatrix {
  public:
    explicit WeightMatrix(const RealMatrix& g);
    static WeightMatrix identity(int d);

    const RealMatrix& mat() const { return g_; }
    int dim() const { return static_cast<int>(g_.rows()); }
    WeightMatrix normalized() const;  // Tr G = 1

  private:
    RealMatrix g_;
};

// Symmetric logarithmic derivative: solves rho L + L rho = 2 drho on the
// support of rho. Entries across eigenvalue pairs below the support cut are
// zero; a d(rho) component living entirely off the support is an error.
HermitianMatrix sld(const DensityMatrix& rho, const HermitianMatrix& drho);

InfoBundle info_bundle(const EncodedModel& enc);

// Tr[G F^{-1}], the scalar SLD (classical-information) bound.
double c_s(const WeightMatrix& g, const RealMatrix& fisher);

// Tr[G F^{-1}] + TrAbs[G F^{-1} A F^{-1}], upper bound on the Holevo bound.
double c_z(const WeightMatrix& g, const InfoBundle& bundle);

// ||F^{-1/2} A F^{-1/2}||, the closed-form upper bound on the incompatibility.
double istar(const InfoBundle& bundle);

struct OptimalWeight {
    WeightMatrix weight;
    bool no_incompatibility;  // A = 0: every weight is optimal; weight = F / Tr F
};

// Weight matrix saturating sup_G TrAbs[G F^{-1} A F^{-1}] / Tr[G F^{-1}],
// built from the leading 2x2 canonical block of F^{-1/2} A F^{-1/2}.
OptimalWeight optimal_weight_istar(const InfoBundle& bundle);

// G = sum_i g_i |grad f_i><grad f_i| for non-negative weights g_i.
WeightMatrix weight_from_functions(const std::vector<RealVector>& grads,
                                   const std::vector<double>& weights);

struct SeparableBound {
    double value;
    bool exact;  // true iff D = 2, where the bound equals d
};

// Lower bound d/(D-1) on the separable-measurement figure of merit; exact
// value d for qubits.
SeparableBound separable_bound(int d, int dim);

// sqrt(2 Tr rho^2 - 1) |lambda|: the depolarized-qubit two-phase model.
double qubit_closed_form(double purity, double lambda);

// |lambda| D / (2 + lambda (D-2)) * istar0: noise scaling of the upper bound.
double ddim_scaling(int dim, double lambda, double istar0);

// 2 |lambda| (D-2) / (2 - lambda (D-2)): asymmetry of the scaling around zero.
double kappa_star(int dim, double lambda);

// Same model with parameters eta, theta = theta(eta), J = d(theta)/d(eta):
// derivative columns recombine as drho'_j = sum_k J_kj drho_k.
EncodedModel reparametrize(const EncodedModel& enc, const RealMatrix& jacobian);

}  // namespace qincompat::estimation
