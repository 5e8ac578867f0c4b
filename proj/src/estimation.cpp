#include "qincompat/estimation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace qincompat::estimation {

using matcore::eig_hermitian;
using matcore::psd_power;

void InfoBundle::require_nonsingular() const {
    if (fisher_singular)
        throw SingularFisher("Fisher matrix is numerically singular at this model point");
}

WeightMatrix::WeightMatrix(const RealMatrix& g) : g_(0.5 * (g + g.transpose())) {
    if (g.rows() != g.cols() || g.rows() < 1) throw InvalidInput("WeightMatrix: must be square");
    if ((g - g.transpose()).norm() > 1e-10) throw InvalidInput("WeightMatrix: not symmetric");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(g_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, g_.norm()))
        throw InvalidInput("WeightMatrix: not positive semidefinite");
}

WeightMatrix WeightMatrix::identity(int d) { return WeightMatrix(RealMatrix::Identity(d, d)); }

WeightMatrix WeightMatrix::normalized() const {
    const double tr = g_.trace();
    if (tr < 1e-300) throw InvalidInput("WeightMatrix: cannot normalize zero weight");
    return WeightMatrix(g_ / tr);
}

HermitianMatrix sld(const DensityMatrix& rho, const HermitianMatrix& drho) {
    if (rho.dim() != drho.dim()) throw InvalidInput("sld: dimension mismatch");
    if (std::abs(drho.mat().trace()) > 1e-8)
        throw InvalidInput("sld: d(rho) must be traceless");

    auto ed = eig_hermitian(HermitianMatrix(rho.mat()));
    const Eigen::Index n = rho.dim();
    const double tau = numerics().support_rel_tol * ed.eigenvalues.maxCoeff();

    ComplexMatrix dr = ed.eigenvectors.adjoint() * drho.mat() * ed.eigenvectors;

    // d(rho) restricted to the kernel of rho must vanish: the model would
    // otherwise leave the support and the Fisher information diverges.
    double off = 0.0;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b)
            if (ed.eigenvalues[a] + ed.eigenvalues[b] <= tau) off += std::norm(dr(a, b));
    if (std::sqrt(off) > numerics().offsupport_tol)
        throw ModelNotDifferentiable("sld: d(rho) has weight " + std::to_string(std::sqrt(off)) +
                                     " outside the support of rho");

    ComplexMatrix l(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const double denom = ed.eigenvalues[a] + ed.eigenvalues[b];
            l(a, b) = denom > tau ? 2.0 * dr(a, b) / denom : Complex(0, 0);
        }
    return HermitianMatrix(ed.eigenvectors * l * ed.eigenvectors.adjoint());
}

InfoBundle info_bundle(const EncodedModel& enc) {
    const int d = enc.parameter_count();
    InfoBundle out;
    out.slds.reserve(d);
    for (int j = 0; j < d; ++j) out.slds.push_back(sld(enc.rho_theta, enc.drho[j]));

    auto ed = eig_hermitian(HermitianMatrix(enc.rho_theta.mat()));
    const double tau = numerics().support_rel_tol * ed.eigenvalues.maxCoeff();
    out.support_rank = static_cast<int>((ed.eigenvalues.array() > tau).count());

    out.fisher = RealMatrix(d, d);
    out.commutator = RealMatrix(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Complex m = (enc.rho_theta.mat() * out.slds[i].mat() * out.slds[j].mat()).trace();
            // Tr[rho L_i L_j] = F_ij + i A_ij; the symmetrized and antisymmetrized
            // parts must come out real up to roundoff.
            out.fisher(i, j) = m.real();
            out.commutator(i, j) = m.imag();
        }
    RealMatrix fsym = 0.5 * (out.fisher + out.fisher.transpose());
    RealMatrix aanti = 0.5 * (out.commutator - out.commutator.transpose());
    const double scale = std::max(1.0, fsym.norm());
    if ((out.fisher - fsym).norm() > 1e-8 * scale || (out.commutator - aanti).norm() > 1e-8 * scale)
        throw SingularMatrix("info_bundle: information matrices are not (anti)symmetric");
    out.fisher = fsym;
    out.commutator = aanti;

    Eigen::SelfAdjointEigenSolver<RealMatrix> es(out.fisher, Eigen::EigenvaluesOnly);
    out.fisher_singular =
        es.eigenvalues().minCoeff() <= numerics().singular_fisher_rel * out.fisher.norm();
    return out;
}

namespace {

RealMatrix fisher_inverse(const RealMatrix& fisher) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(fisher);
    if (es.eigenvalues().minCoeff() <= numerics().singular_fisher_rel * fisher.norm())
        throw SingularFisher("Fisher matrix is numerically singular");
    return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace

double c_s(const WeightMatrix& g, const RealMatrix& fisher) {
    if (g.dim() != fisher.rows()) throw InvalidInput("c_s: dimension mismatch");
    return (g.mat() * fisher_inverse(fisher)).trace();
}

double c_z(const WeightMatrix& g, const InfoBundle& bundle) {
    bundle.require_nonsingular();
    RealMatrix finv = fisher_inverse(bundle.fisher);
    RealMatrix r = finv * bundle.commutator * finv;
    const double abs_term = matcore::trace_abs(HermitianMatrix(g.mat().cast<Complex>()),
                                               HermitianMatrix(Complex(0, 1) * r.cast<Complex>()));
    return (g.mat() * finv).trace() + abs_term;
}

double istar(const InfoBundle& bundle) {
    bundle.require_nonsingular();
    RealMatrix fmh =
        psd_power(HermitianMatrix(bundle.fisher.cast<Complex>()), -0.5).mat().real();
    const double v = matcore::operator_norm((fmh * bundle.commutator * fmh).cast<Complex>());
    if (v > 1.0 + 1e-9)
        throw SingularMatrix("istar: value " + std::to_string(v) +
                             " above 1; inconsistent information matrices");
    return v;
}

OptimalWeight optimal_weight_istar(const InfoBundle& bundle) {
    bundle.require_nonsingular();
    const int d = bundle.parameter_count();
    if (bundle.commutator.norm() <= 1e-14 * std::max(1.0, bundle.fisher.norm())) {
        RealMatrix g = bundle.fisher / bundle.fisher.trace();
        return OptimalWeight{WeightMatrix(g), true};
    }

    HermitianMatrix fh(bundle.fisher.cast<Complex>());
    RealMatrix fsqrt = psd_power(fh, 0.5).mat().real();
    RealMatrix fmh = psd_power(fh, -0.5).mat().real();
    RealMatrix aprime = fmh * bundle.commutator * fmh;

    // i A' is Hermitian with +/- paired spectrum; the top pair spans the
    // leading 2x2 canonical block of A'.
    ComplexMatrix ia = Complex(0, 1) * aprime.cast<Complex>();
    auto ed = eig_hermitian(HermitianMatrix(ia));
    const ComplexVector top = ed.eigenvectors.col(d - 1);  // largest eigenvalue
    RealVector re = top.real(), im = top.imag();

    // Projector onto span{Re v, Im v} with equal weights 1/2; for a unit
    // eigenvector of a +/- pair, ||Re v||^2 = ||Im v||^2 = 1/2.
    RealMatrix gtilde = re * re.transpose() + im * im.transpose();
    RealMatrix g = fsqrt * gtilde * fsqrt;
    return OptimalWeight{WeightMatrix(g), false};
}

WeightMatrix weight_from_functions(const std::vector<RealVector>& grads,
                                   const std::vector<double>& weights) {
    if (grads.size() != weights.size())
        throw InvalidInput("weight_from_functions: gradient/weight count mismatch");
    if (grads.empty()) throw InvalidInput("weight_from_functions: empty list needs a dimension");
    const Eigen::Index d = grads.front().size();
    RealMatrix g = RealMatrix::Zero(d, d);
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (grads[i].size() != d) throw InvalidInput("weight_from_functions: mixed dimensions");
        if (weights[i] < 0) throw InvalidInput("weight_from_functions: negative weight");
        g += weights[i] * (grads[i] * grads[i].transpose());
    }
    return WeightMatrix(g);
}

SeparableBound separable_bound(int d, int dim) {
    if (d < 1 || dim < 2 || d > dim * dim - 1)
        throw InvalidInput("separable_bound: need 1 <= d <= D^2 - 1, D >= 2");
    if (dim == 2) return SeparableBound{static_cast<double>(d), true};
    return SeparableBound{static_cast<double>(d) / (dim - 1), false};
}

double qubit_closed_form(double purity, double lambda) {
    if (purity < 0.5 - 1e-12 || purity > 1.0 + 1e-12)
        throw InvalidInput("qubit_closed_form: purity outside [1/2, 1]");
    if (lambda < -1.0 / 3.0 - 1e-12 || lambda > 1.0 + 1e-12)
        throw InvalidInput("qubit_closed_form: lambda outside [-1/3, 1]");
    return std::sqrt(std::max(0.0, 2.0 * purity - 1.0)) * std::abs(lambda);
}

double ddim_scaling(int dim, double lambda, double istar0) {
    if (dim < 2) throw InvalidInput("ddim_scaling: D >= 2 required");
    const double d = static_cast<double>(dim);
    if (lambda < -1.0 / (d * d - 1.0) - 1e-12 || lambda > 1.0 + 1e-12)
        throw InvalidInput("ddim_scaling: lambda outside [-1/(D^2-1), 1]");
    const double denom = 2.0 + lambda * (d - 2.0);
    return std::abs(lambda) * d / denom * istar0;
}

double kappa_star(int dim, double lambda) {
    if (dim < 2) throw InvalidInput("kappa_star: D >= 2 required");
    const double d = static_cast<double>(dim);
    if (lambda < -1.0 / (d * d - 1.0) - 1e-12 || lambda > 1.0 + 1e-12)
        throw InvalidInput("kappa_star: lambda outside [-1/(D^2-1), 1]");
    const double denom = 2.0 - lambda * (d - 2.0);
    // Outside the mirrored interval |lambda| <= 1/(D^2-1) the formula can lose
    // its meaning for D >= 5 (the reflected channel stops existing).
    if (denom <= 0)
        throw InvalidInput("kappa_star: 2 - lambda (D-2) <= 0; reflected noise not defined");
    return 2.0 * std::abs(lambda) * (d - 2.0) / denom;
}

EncodedModel reparametrize(const EncodedModel& enc, const RealMatrix& jacobian) {
    const int d = enc.parameter_count();
    if (jacobian.rows() != d || jacobian.cols() != d)
        throw InvalidInput("reparametrize: jacobian must be d x d");
    if (std::abs(jacobian.determinant()) < 1e-14)
        throw InvalidInput("reparametrize: jacobian is singular");

    EncodedModel out{enc.rho_theta, {}, {}};
    for (int j = 0; j < d; ++j) {
        ComplexMatrix dr = ComplexMatrix::Zero(enc.dim(), enc.dim());
        ComplexMatrix h = ComplexMatrix::Zero(enc.dim(), enc.dim());
        for (int k = 0; k < d; ++k) {
            dr += jacobian(k, j) * enc.drho[k].mat();
            h += jacobian(k, j) * enc.effective_generators[k].mat();
        }
        out.drho.emplace_back(dr);
        out.effective_generators.emplace_back(h);
    }
    return out;
}

}  // namespace qincompat::estimation
