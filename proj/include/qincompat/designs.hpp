#pragma once

#include "qincompat/holevo.hpp"

namespace qincompat::designs {

using model::GeneratorSet;
using model::NoiseSpec;
using model::StatisticalModel;

enum class Verdict { CompatibleByA, CompatibleBySdp, Incompatible, Inconclusive };

std::string to_string(Verdict v);

struct CompatibilityCertificate {
    double a_norm = 0.0;          // ||A(theta)||_F
    std::optional<double> sdp_r;  // r from the SDP when it was run
    Verdict verdict = Verdict::Inconclusive;
};

// (1/sqrt(D)) sum_i |i>|i>, the maximally entangled probe on two D-dim systems.
ComplexVector max_entangled_state(Eigen::Index dim);

// Ancilla-aided model: the pair evolves under 1 (x) U_theta, so the generators
// lift as 1 (x) H_j. Fully compatible for every theta.
StatisticalModel ancilla_model(const GeneratorSet& gens, const RealVector& theta,
                               const NoiseSpec& noise = NoiseSpec::none());

// Both halves encoded: U_theta (x) U_theta with generators H_j (x) 1 + 1 (x) H_j.
StatisticalModel double_model(const GeneratorSet& gens, const RealVector& theta,
                              const NoiseSpec& noise = NoiseSpec::none());

struct AntiparallelSpec {
    std::vector<int> subset;      // 1-based block indices j with |a_j| > 0, j <= floor(D/2)
    std::vector<int> signs;       // s_j in {0, 1}, same length as subset
    std::vector<double> phases1;  // phi^1_j
    std::vector<double> phases2;  // phi^2_j
    bool include_null_vector = false;  // odd D: also mix in the zero-eigenvalue vector

    static AntiparallelSpec simple(int blocks);
};

struct AntiparallelPair {
    ComplexVector psi1;
    ComplexVector psi2;
};

// States built from the canonical +/- eigenvector pairs of the commutator of
// the two effective generators; their opposite commutator expectations cancel,
// which makes the product model psi1 (x) psi2 under U (x) U compatible.
AntiparallelPair antiparallel_pair(const HermitianMatrix& h1eff, const HermitianMatrix& h2eff,
                                   const AntiparallelSpec& spec);

// Certificate for the D-fold product of an orthonormal basis under U^(x)D:
// every commutator expectation sums to a trace of a commutator, hence zero.
CompatibilityCertificate basis_product_compatibility(const std::vector<ComplexVector>& states,
                                                     const GeneratorSet& gens,
                                                     const RealVector& theta);

CompatibilityCertificate certify(const StatisticalModel& model, bool run_sdp,
                                 const holevo::HolevoOptions& opts = {});

}  // namespace qincompat::designs
