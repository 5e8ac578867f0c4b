#include "qincompat/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace qincompat {

namespace {

void require_finite(const ComplexMatrix& m, const char* who) {
    if (!m.allFinite()) throw InvalidInput(std::string(who) + ": non-finite entries");
}

}  // namespace

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw InvalidInput("HermitianMatrix: matrix must be square and non-empty");
    require_finite(m, "HermitianMatrix");
    const double asym = (m - m.adjoint()).norm();
    if (asym > numerics().hermiticity_error_tol)
        throw InvalidInput("HermitianMatrix: asymmetry " + std::to_string(asym) +
                           " exceeds tolerance");
    m_ = 0.5 * (m + m.adjoint());
}

namespace matcore {

ComplexMatrix pauli_x() {
    ComplexMatrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

ComplexMatrix pauli_y() {
    ComplexMatrix s(2, 2);
    s << 0, Complex(0, -1), Complex(0, 1), 0;
    return s;
}

ComplexMatrix pauli_z() {
    ComplexMatrix s(2, 2);
    s << 1, 0, 0, -1;
    return s;
}

ComplexMatrix identity(Eigen::Index d) { return ComplexMatrix::Identity(d, d); }

EigenDecomposition eig_hermitian(const HermitianMatrix& m) {
    require_finite(m.mat(), "eig_hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.mat());
    if (solver.info() != Eigen::Success)
        throw SingularMatrix("eig_hermitian: eigensolver did not converge");
    return EigenDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

HermitianMatrix psd_power(const HermitianMatrix& m, double p) {
    auto ed = eig_hermitian(m);
    const Eigen::Index n = m.dim();
    const double scale = ed.eigenvalues.cwiseAbs().maxCoeff();
    const double clamp = numerics().psd_clamp_rel * std::max(1.0, scale);

    RealVector lam = ed.eigenvalues;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lam[i] < -clamp)
            throw InvalidInput("psd_power: matrix has a negative eigenvalue " +
                               std::to_string(lam[i]));
        if (lam[i] < 0) lam[i] = 0.0;
    }
    if (p < 0) {
        const double floor = static_cast<double>(n) * numerics().psd_clamp_rel * scale;
        if (lam.minCoeff() <= floor)
            throw SingularMatrix("psd_power: singular matrix with negative power");
    }

    RealVector powered(n);
    for (Eigen::Index i = 0; i < n; ++i)
        powered[i] = (lam[i] == 0.0 && p > 0) ? 0.0 : std::pow(lam[i], p);
    ComplexMatrix out = ed.eigenvectors * powered.asDiagonal() * ed.eigenvectors.adjoint();
    return HermitianMatrix(out);
}

double operator_norm(const ComplexMatrix& m) {
    require_finite(m, "operator_norm");
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().maxCoeff();
}

double trace_abs(const HermitianMatrix& g, const HermitianMatrix& r) {
    if (g.dim() != r.dim()) throw InvalidInput("trace_abs: dimension mismatch");
    HermitianMatrix sqrt_g = psd_power(g, 0.5);  // rejects non-PSD G
    HermitianMatrix inner(sqrt_g.mat() * r.mat() * sqrt_g.mat());
    return eig_hermitian(inner).eigenvalues.cwiseAbs().sum();
}

ComplexMatrix expm_i(const HermitianMatrix& h) {
    auto ed = eig_hermitian(h);
    ComplexVector phases(h.dim());
    for (Eigen::Index i = 0; i < h.dim(); ++i)
        phases[i] = std::exp(Complex(0, ed.eigenvalues[i]));
    return ed.eigenvectors * phases.asDiagonal() * ed.eigenvectors.adjoint();
}

Complex phi_divided_difference(Complex z) {
    if (std::abs(z) < numerics().phi_taylor_threshold)
        return 1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
    return (std::exp(z) - 1.0) / z;
}

HermitianMatrix averaged_conjugation(const HermitianMatrix& h, const HermitianMatrix& k) {
    if (h.dim() != k.dim()) throw InvalidInput("averaged_conjugation: dimension mismatch");
    auto ed = eig_hermitian(h);
    ComplexMatrix kt = ed.eigenvectors.adjoint() * k.mat() * ed.eigenvectors;
    for (Eigen::Index a = 0; a < h.dim(); ++a)
        for (Eigen::Index b = 0; b < h.dim(); ++b)
            kt(a, b) *= phi_divided_difference(Complex(0, ed.eigenvalues[b] - ed.eigenvalues[a]));
    return HermitianMatrix(ed.eigenvectors * kt * ed.eigenvectors.adjoint());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<Eigen::Index>& dims,
                            std::size_t site) {
    Eigen::Index total = 1;
    for (Eigen::Index d : dims) {
        if (d < 1) throw InvalidInput("partial_trace: dims must be positive");
        total *= d;
    }
    if (m.rows() != total || m.cols() != total)
        throw InvalidInput("partial_trace: dims do not match matrix size");
    if (site >= dims.size()) throw InvalidInput("partial_trace: site out of range");

    // Split indices as (left, site, right) with row-major site ordering.
    Eigen::Index left = 1, right = 1;
    for (std::size_t k = 0; k < site; ++k) left *= dims[k];
    for (std::size_t k = site + 1; k < dims.size(); ++k) right *= dims[k];
    const Eigen::Index ds = dims[site];

    ComplexMatrix out = ComplexMatrix::Zero(left * right, left * right);
    for (Eigen::Index la = 0; la < left; ++la)
        for (Eigen::Index ra = 0; ra < right; ++ra)
            for (Eigen::Index lb = 0; lb < left; ++lb)
                for (Eigen::Index rb = 0; rb < right; ++rb) {
                    Complex sum = 0.0;
                    for (Eigen::Index s = 0; s < ds; ++s)
                        sum += m((la * ds + s) * right + ra, (lb * ds + s) * right + rb);
                    out(la * right + ra, lb * right + rb) = sum;
                }
    return out;
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw InvalidInput("fidelity: dimension mismatch");
    HermitianMatrix r(rho), s(sigma);
    HermitianMatrix sqrt_rho = psd_power(r, 0.5);    // rejects non-PSD rho
    (void)psd_power(s, 1.0);                         // rejects non-PSD sigma
    HermitianMatrix inner(sqrt_rho.mat() * s.mat() * sqrt_rho.mat());
    auto ed = eig_hermitian(inner);
    double tr = 0.0;
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
        tr += std::sqrt(std::max(0.0, ed.eigenvalues[i]));
    return tr * tr;
}

}  // namespace matcore
}  // namespace qincompat
