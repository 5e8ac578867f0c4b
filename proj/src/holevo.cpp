#include "qincompat/holevo.hpp"

#include <cmath>

namespace qincompat::holevo {

using estimation::c_s;
using estimation::c_z;
using estimation::info_bundle;
using matcore::eig_hermitian;
using matcore::psd_power;

std::vector<ComplexMatrix> hermitian_basis(Eigen::Index dim) {
    if (dim < 2) throw InvalidInput("hermitian_basis: D >= 2 required");
    std::vector<ComplexMatrix> basis;
    basis.reserve(dim * dim);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    basis.push_back(ComplexMatrix::Identity(dim, dim) / std::sqrt(static_cast<double>(dim)));
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index k = j + 1; k < dim; ++k) {
            ComplexMatrix sym = ComplexMatrix::Zero(dim, dim);
            sym(j, k) = inv_sqrt2;
            sym(k, j) = inv_sqrt2;
            basis.push_back(sym);
            ComplexMatrix anti = ComplexMatrix::Zero(dim, dim);
            anti(j, k) = Complex(0, -inv_sqrt2);
            anti(k, j) = Complex(0, inv_sqrt2);
            basis.push_back(anti);
        }
    for (Eigen::Index l = 1; l < dim; ++l) {
        // diag(1, ..., 1, -l, 0, ..., 0) / sqrt(l (l+1))
        ComplexMatrix diag = ComplexMatrix::Zero(dim, dim);
        const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (Eigen::Index i = 0; i < l; ++i) diag(i, i) = norm;
        diag(l, l) = -static_cast<double>(l) * norm;
        basis.push_back(diag);
    }
    return basis;
}

std::pair<ComplexMatrix, int> r_factor(const DensityMatrix& rho) {
    auto ed = eig_hermitian(HermitianMatrix(rho.mat()));
    const Eigen::Index n = rho.dim();
    const double tau = numerics().support_rel_tol * ed.eigenvalues.maxCoeff();

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = n - 1; i >= 0; --i)   // largest first
        if (ed.eigenvalues[i] > tau) keep.push_back(i);

    ComplexMatrix r(static_cast<Eigen::Index>(keep.size()), n);
    for (std::size_t row = 0; row < keep.size(); ++row) {
        ComplexVector v = ed.eigenvectors.col(keep[row]);
        // Fix the eigenvector phase: largest component real positive.
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::polar(1.0, -std::arg(v[imax]));
        r.row(static_cast<Eigen::Index>(row)) =
            std::sqrt(ed.eigenvalues[keep[row]]) * v.adjoint();
    }
    return {r, static_cast<int>(keep.size())};
}

HolevoAssembly assemble(const EncodedModel& enc) {
    HolevoAssembly a;
    const Eigen::Index dim = enc.dim();
    const int d = enc.parameter_count();
    a.basis = hermitian_basis(dim);
    auto [r, rank] = r_factor(enc.rho_theta);
    a.r_factor = r;
    a.rank = rank;

    const auto dtilde = static_cast<Eigen::Index>(a.basis.size());
    a.dsdtheta.resize(dtilde, d);
    a.state_components.resize(dtilde);
    for (Eigen::Index k = 0; k < dtilde; ++k) {
        for (int j = 0; j < d; ++j) {
            const Complex v = (a.basis[k] * enc.drho[j].mat()).trace();
            if (std::abs(v.imag()) > 1e-10)
                throw SingularMatrix("assemble: complex component in ds/dtheta");
            a.dsdtheta(k, j) = v.real();
        }
        a.state_components[k] = (a.basis[k] * enc.rho_theta.mat()).trace().real();
    }
    return a;
}

namespace {

// Shared construction of the Holevo PSD block and unbiasedness equalities.
struct ProgramParts {
    sdp::VarHandle v;  // d x d symmetric
    sdp::VarHandle x;  // d~ * d scalar coefficients, column-major (k + dtilde * i)
};

ProgramParts add_holevo_constraints(sdp::SdpProblem& prob, const HolevoAssembly& a, int d,
                                    bool mean_zero_rows) {
    const auto dtilde = static_cast<Eigen::Index>(a.basis.size());
    const Eigen::Index rdim = a.r_factor.rows() * a.r_factor.cols();

    ProgramParts parts;
    parts.v = prob.add_symmetric("V", d);
    parts.x = prob.add_scalar_block("X", static_cast<int>(dtilde) * d);

    // Columns of the (r D) x d matrix W are vec(R X_i), X_i = sum_k X_ki b_k.
    std::vector<ComplexMatrix> rb(dtilde);
    for (Eigen::Index k = 0; k < dtilde; ++k) rb[k] = a.r_factor * a.basis[k];

    const sdp::VarHandle vh = parts.v;
    const sdp::VarHandle xh = parts.x;
    prob.add_psd_hermitian(
        "holevo", static_cast<int>(d + rdim),
        [=, &a](const sdp::Assignment& as) -> ComplexMatrix {
            RealMatrix v = as.symmetric(vh);
            RealVector x = as.scalars(xh);
            ComplexMatrix block = ComplexMatrix::Zero(d + rdim, d + rdim);
            block.topLeftCorner(d, d) = v.cast<Complex>();
            block.bottomRightCorner(rdim, rdim) = ComplexMatrix::Identity(rdim, rdim);
            for (int i = 0; i < d; ++i) {
                ComplexMatrix w = ComplexMatrix::Zero(a.r_factor.rows(), a.r_factor.cols());
                for (Eigen::Index k = 0; k < dtilde; ++k) {
                    const double coef = x[k + dtilde * i];
                    if (coef != 0.0) w += coef * rb[k];
                }
                // Column-major vectorization of R X_i.
                ComplexVector wv(rdim);
                Eigen::Index pos = 0;
                for (Eigen::Index cc = 0; cc < w.cols(); ++cc)
                    for (Eigen::Index rr = 0; rr < w.rows(); ++rr) wv[pos++] = w(rr, cc);
                block.block(d, i, rdim, 1) = wv;
                block.block(i, d, 1, rdim) = wv.adjoint();
            }
            return block;
        });

    // Local unbiasedness X^T ds/dtheta = 1_d.
    RealVector rhs = RealVector::Zero(d * d);
    for (int i = 0; i < d; ++i) rhs[i * d + i] = 1.0;
    prob.add_equalities("unbiasedness", d * d,
                        [=, &a](const sdp::Assignment& as) -> RealVector {
                            RealVector x = as.scalars(xh);
                            RealVector out(d * d);
                            for (int i = 0; i < d; ++i)
                                for (int j = 0; j < d; ++j) {
                                    double sum = 0.0;
                                    for (Eigen::Index k = 0; k < dtilde; ++k)
                                        sum += x[k + dtilde * i] * a.dsdtheta(k, j);
                                    out[i * d + j] = sum;
                                }
                            return out;
                        },
                        rhs);

    if (mean_zero_rows) {
        prob.add_equalities("mean-zero", d,
                            [=, &a](const sdp::Assignment& as) -> RealVector {
                                RealVector x = as.scalars(xh);
                                RealVector out(d);
                                for (int i = 0; i < d; ++i) {
                                    double sum = 0.0;
                                    for (Eigen::Index k = 0; k < dtilde; ++k)
                                        sum += x[k + dtilde * i] * a.state_components[k];
                                    out[i] = sum;
                                }
                                return out;
                            },
                            RealVector::Zero(d));
    }
    return parts;
}

}  // namespace

HolevoResult holevo_bound(const WeightMatrix& g, const EncodedModel& enc,
                          const HolevoOptions& opts) {
    const int d = enc.parameter_count();
    if (g.dim() != d) throw InvalidInput("holevo_bound: weight dimension mismatch");
    InfoBundle bundle = info_bundle(enc);
    bundle.require_nonsingular();

    // Precondition through the scale freedom of the parameters: with
    // theta = c eta the Fisher matrix is normalized to unit norm and the
    // program variables stay O(1); the bound maps back as C_H = c^2 C_H'.
    const double c = 1.0 / std::sqrt(bundle.fisher.norm());
    EncodedModel scaled =
        estimation::reparametrize(enc, RealMatrix(c * RealMatrix::Identity(d, d)));

    HolevoAssembly a = assemble(scaled);
    sdp::SdpProblem prob;
    ProgramParts parts = add_holevo_constraints(prob, a, d, opts.mean_zero_rows);
    const RealMatrix gmat = g.mat();
    const sdp::VarHandle vh = parts.v;
    prob.set_objective([=](const sdp::Assignment& as) {
        return (gmat.array() * as.symmetric(vh).array()).sum();
    });

    sdp::SdpSolution s = prob.solve(opts.sdp);
    HolevoResult out;
    out.c_h = c * c * s.objective;
    out.status = s.status;
    out.duality_gap = c * c * s.duality_gap;
    out.iterations = s.iterations;
    // Estimator observables are scale-invariant contracts: X_i(theta) = X'_i / c.
    const auto dtilde = static_cast<Eigen::Index>(a.basis.size());
    out.x_star.resize(dtilde, d);
    RealVector xs = s.scalars(parts.x);
    for (int i = 0; i < d; ++i) out.x_star.col(i) = xs.segment(dtilde * i, dtilde) / c;
    return out;
}

IncompatReport r_figure(const EncodedModel& enc, const HolevoOptions& opts) {
    const int d = enc.parameter_count();
    InfoBundle bundle = info_bundle(enc);
    bundle.require_nonsingular();

    IncompatReport report;
    auto g_id = WeightMatrix::identity(d);
    report.c_s_identity = c_s(g_id, bundle.fisher);
    report.c_z_identity = c_z(g_id, bundle);
    report.istar = estimation::istar(bundle);
    auto sep = estimation::separable_bound(d, static_cast<int>(enc.dim()));
    report.separable_bound = sep.value;
    report.separable_exact = sep.exact;

    // The figure of merit is reparametrization invariant; normalize the Fisher
    // matrix scale to keep the program variables O(1).
    const double c = 1.0 / std::sqrt(bundle.fisher.norm());
    EncodedModel scaled =
        estimation::reparametrize(enc, RealMatrix(c * RealMatrix::Identity(d, d)));
    InfoBundle scaled_bundle = info_bundle(scaled);

    const RealMatrix fsqrt =
        psd_power(HermitianMatrix(scaled_bundle.fisher.cast<Complex>()), 0.5).mat().real();

    HolevoAssembly a = assemble(scaled);
    sdp::SdpProblem prob;
    ProgramParts parts = add_holevo_constraints(prob, a, d, opts.mean_zero_rows);
    sdp::VarHandle th = prob.add_scalar("t");
    const sdp::VarHandle vh = parts.v;

    // ||F^1/2 V F^1/2|| <= t as a PSD condition on the 2x2 block matrix.
    prob.add_psd("spectral-norm", 2 * d, [=](const sdp::Assignment& as) -> RealMatrix {
        const double t = as.scalar(th);
        RealMatrix fvf = fsqrt * as.symmetric(vh) * fsqrt;
        RealMatrix block = RealMatrix::Zero(2 * d, 2 * d);
        block.topLeftCorner(d, d) = t * RealMatrix::Identity(d, d);
        block.bottomRightCorner(d, d) = t * RealMatrix::Identity(d, d);
        block.topRightCorner(d, d) = fvf;
        block.bottomLeftCorner(d, d) = fvf;
        return block;
    });
    prob.set_objective([=](const sdp::Assignment& as) { return as.scalar(th); });

    sdp::SdpSolution s = prob.solve(opts.sdp);
    report.sdp_status = s.status;
    report.sdp_gap = s.duality_gap;
    report.sdp_iterations = s.iterations;
    report.r = s.objective;
    report.incompatibility = report.r - 1.0;

    // C_H at the identity weight comes from its own program.
    HolevoResult ch = holevo_bound(g_id, enc, opts);
    report.c_h_identity = ch.c_h;
    if (ch.status != sdp::Status::Optimal) report.sdp_status = ch.status;
    return report;
}

}  // namespace qincompat::holevo
