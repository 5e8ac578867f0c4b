#include "qincompat/model.hpp"

#include <cmath>

namespace qincompat::model {

using matcore::eig_hermitian;
using matcore::expm_i;

DensityMatrix::DensityMatrix(const ComplexMatrix& m) : m_(m) {
    const auto& cfg = numerics();
    const double tr = m_.mat().trace().real();
    if (std::abs(tr - 1.0) > cfg.trace_tol)
        throw InvalidInput("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    auto ed = eig_hermitian(m_);
    const double clamp = cfg.psd_clamp_rel * std::max(1.0, ed.eigenvalues.cwiseAbs().maxCoeff());
    if (ed.eigenvalues.minCoeff() < -clamp)
        throw InvalidInput("DensityMatrix: negative eigenvalue " +
                           std::to_string(ed.eigenvalues.minCoeff()));
    const double pur = purity();
    const double d = static_cast<double>(dim());
    if (pur < 1.0 / d - cfg.trace_tol || pur > 1.0 + cfg.trace_tol)
        throw InvalidInput("DensityMatrix: purity " + std::to_string(pur) + " out of range");
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const double n = psi.norm();
    if (n < 1e-12) throw InvalidInput("DensityMatrix::pure: zero vector");
    ComplexVector v = psi / n;
    return DensityMatrix(ComplexMatrix(v * v.adjoint()));
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

GeneratorSet::GeneratorSet(std::vector<HermitianMatrix> gens) : gens_(std::move(gens)) {
    if (gens_.empty()) throw InvalidInput("GeneratorSet: need at least one generator");
    const Eigen::Index d = gens_.front().dim();
    for (const auto& g : gens_) {
        if (g.dim() != d) throw InvalidInput("GeneratorSet: mixed dimensions");
        if (std::abs(g.mat().trace()) > numerics().traceless_tol)
            throw InvalidInput("GeneratorSet: generator is not traceless");
    }
    if (static_cast<Eigen::Index>(gens_.size()) > d * d - 1)
        throw InvalidInput("GeneratorSet: more than D^2 - 1 parameters");
}

NoiseSpec NoiseSpec::none() { return NoiseSpec{NoiseKind::None, 1.0, {}}; }

NoiseSpec NoiseSpec::global_depolarizing(double lambda) {
    return NoiseSpec{NoiseKind::GlobalDepolarizing, lambda, {}};
}

NoiseSpec NoiseSpec::local_depolarizing(double lambda, std::vector<Eigen::Index> site_dims) {
    NoiseSpec n{NoiseKind::LocalDepolarizing, lambda, std::move(site_dims)};
    for (Eigen::Index d : n.site_dims)
        if (d != 2) throw InvalidInput("NoiseSpec: local depolarizing supports qubit sites only");
    if (n.site_dims.empty()) throw InvalidInput("NoiseSpec: local depolarizing needs site_dims");
    if (lambda < -1.0 / 3.0 || lambda > 1.0)
        throw InvalidInput("NoiseSpec: local lambda outside [-1/3, 1]");
    return n;
}

void NoiseSpec::validate(Eigen::Index dim) const {
    switch (kind) {
        case NoiseKind::None:
            return;
        case NoiseKind::GlobalDepolarizing: {
            const double d = static_cast<double>(dim);
            const double lo = -1.0 / (d * d - 1.0);
            if (lambda < lo - 1e-15 || lambda > 1.0 + 1e-15)
                throw InvalidInput("NoiseSpec: global lambda outside [-1/(D^2-1), 1]");
            return;
        }
        case NoiseKind::LocalDepolarizing: {
            Eigen::Index prod = 1;
            for (Eigen::Index d : site_dims) prod *= d;
            if (prod != dim) throw InvalidInput("NoiseSpec: site_dims do not multiply to D");
            if (lambda < -1.0 / 3.0 - 1e-15 || lambda > 1.0 + 1e-15)
                throw InvalidInput("NoiseSpec: local lambda outside [-1/3, 1]");
            return;
        }
    }
}

StatisticalModel::StatisticalModel(DensityMatrix probe_, GeneratorSet generators_,
                                   NoiseSpec noise_, RealVector theta_)
    : probe(std::move(probe_)),
      generators(std::move(generators_)),
      noise(std::move(noise_)),
      theta(std::move(theta_)) {
    if (probe.dim() != generators.dim())
        throw InvalidInput("StatisticalModel: probe and generator dimensions differ");
    if (theta.size() != generators.count())
        throw InvalidInput("StatisticalModel: theta length != number of generators");
    if (!theta.allFinite()) throw InvalidInput("StatisticalModel: non-finite theta");
    noise.validate(probe.dim());
}

ComplexMatrix build_unitary(const GeneratorSet& g, const RealVector& theta) {
    if (theta.size() != g.count())
        throw InvalidInput("build_unitary: theta length != number of generators");
    ComplexMatrix h = ComplexMatrix::Zero(g.dim(), g.dim());
    for (int j = 0; j < g.count(); ++j) h += theta[j] * g[j].mat();
    return expm_i(HermitianMatrix(h));
}

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double lambda) {
    NoiseSpec::global_depolarizing(lambda).validate(rho.dim());
    const double d = static_cast<double>(rho.dim());
    return DensityMatrix(lambda * rho.mat() +
                         (1.0 - lambda) / d * ComplexMatrix::Identity(rho.dim(), rho.dim()));
}

namespace {

// One-site depolarizing map on a multi-qubit state, site given as (left, right)
// dimension split: rho -> lambda rho + (1 - lambda) (1/2 (x) Tr_site rho).
ComplexMatrix depolarize_site(const ComplexMatrix& m, Eigen::Index left, Eigen::Index right,
                              double lambda) {
    ComplexMatrix traced = matcore::partial_trace(m, {left, 2, right}, 1);
    ComplexMatrix out = lambda * m;
    const double w = (1.0 - lambda) / 2.0;
    // Re-insert the identity factor at the site position.
    for (Eigen::Index la = 0; la < left; ++la)
        for (Eigen::Index ra = 0; ra < right; ++ra)
            for (Eigen::Index lb = 0; lb < left; ++lb)
                for (Eigen::Index rb = 0; rb < right; ++rb) {
                    const Complex v = w * traced(la * right + ra, lb * right + rb);
                    for (Eigen::Index s = 0; s < 2; ++s)
                        out((la * 2 + s) * right + ra, (lb * 2 + s) * right + rb) += v;
                }
    return out;
}

}  // namespace

DensityMatrix apply_local_depolarizing(const DensityMatrix& rho, double lambda,
                                       const std::vector<Eigen::Index>& site_dims) {
    NoiseSpec spec = NoiseSpec::local_depolarizing(lambda, site_dims);
    spec.validate(rho.dim());
    ComplexMatrix m = rho.mat();
    Eigen::Index left = 1;
    Eigen::Index right = rho.dim();
    for (std::size_t k = 0; k < site_dims.size(); ++k) {
        right /= 2;
        m = depolarize_site(m, left, right, lambda);
        left *= 2;
    }
    return DensityMatrix(m);
}

DensityMatrix apply_noise(const DensityMatrix& rho, const NoiseSpec& noise) {
    switch (noise.kind) {
        case NoiseKind::None:
            return rho;
        case NoiseKind::GlobalDepolarizing:
            return apply_depolarizing(rho, noise.lambda);
        case NoiseKind::LocalDepolarizing:
            return apply_local_depolarizing(rho, noise.lambda, noise.site_dims);
    }
    throw InvalidInput("apply_noise: unknown noise kind");
}

std::vector<HermitianMatrix> effective_generators(const GeneratorSet& g, const RealVector& theta) {
    if (theta.size() != g.count())
        throw InvalidInput("effective_generators: theta length != number of generators");
    ComplexMatrix h = ComplexMatrix::Zero(g.dim(), g.dim());
    for (int j = 0; j < g.count(); ++j) h += theta[j] * g[j].mat();
    HermitianMatrix total(h);
    std::vector<HermitianMatrix> out;
    out.reserve(g.count());
    for (int j = 0; j < g.count(); ++j)
        out.push_back(matcore::averaged_conjugation(total, g[j]));
    return out;
}

EncodedModel encode(const StatisticalModel& model) {
    const ComplexMatrix u = build_unitary(model.generators, model.theta);
    auto heff = effective_generators(model.generators, model.theta);

    // Noise acts after the unitary. Both depolarizing kinds are covariant with
    // their encodings, so the order does not matter for the state.
    DensityMatrix rho_theta = apply_noise(
        DensityMatrix(ComplexMatrix(u * model.probe.mat() * u.adjoint())), model.noise);

    std::vector<HermitianMatrix> drho;
    drho.reserve(heff.size());
    const Complex i(0, 1);
    for (const auto& h : heff) {
        ComplexMatrix comm = h.mat() * model.probe.mat() - model.probe.mat() * h.mat();
        ComplexMatrix d = i * (u * comm * u.adjoint());
        // The channels are linear, so the theta-derivative passes through them.
        switch (model.noise.kind) {
            case NoiseKind::None:
                break;
            case NoiseKind::GlobalDepolarizing:
                // lambda rho + (1-lambda) Tr(rho) 1/D applied to traceless d.
                d *= model.noise.lambda;
                break;
            case NoiseKind::LocalDepolarizing: {
                Eigen::Index left = 1;
                Eigen::Index right = model.dim();
                for (std::size_t k = 0; k < model.noise.site_dims.size(); ++k) {
                    right /= 2;
                    d = depolarize_site(d, left, right, model.noise.lambda);
                    left *= 2;
                }
                break;
            }
        }
        drho.emplace_back(d);
    }
    return EncodedModel{std::move(rho_theta), std::move(drho), std::move(heff)};
}

GeneratorSet lift_local_generators(const GeneratorSet& local, int n_sites) {
    if (n_sites < 1) throw InvalidInput("lift_local_generators: n_sites < 1");
    const Eigen::Index d = local.dim();
    Eigen::Index total = 1;
    for (int s = 0; s < n_sites; ++s) total *= d;

    std::vector<HermitianMatrix> lifted;
    lifted.reserve(local.count());
    for (int j = 0; j < local.count(); ++j) {
        ComplexMatrix sum = ComplexMatrix::Zero(total, total);
        for (int s = 0; s < n_sites; ++s) {
            ComplexMatrix term = ComplexMatrix::Identity(1, 1);
            for (int k = 0; k < n_sites; ++k)
                term = matcore::kron(term, k == s ? local[j].mat() : matcore::identity(d));
            sum += term;
        }
        lifted.emplace_back(sum);
    }
    return GeneratorSet(std::move(lifted));
}

namespace {

// Coordinates of a traceless qubit Hermitian in the Pauli basis.
Eigen::Vector3d pauli_coords(const HermitianMatrix& h) {
    Eigen::Vector3d v;
    v[0] = 0.5 * (h.mat() * matcore::pauli_x()).trace().real();
    v[1] = 0.5 * (h.mat() * matcore::pauli_y()).trace().real();
    v[2] = 0.5 * (h.mat() * matcore::pauli_z()).trace().real();
    return v;
}

}  // namespace

OrthonormalizedQubitGenerators orthonormalize_generators_qubit(const GeneratorSet& g,
                                                               const RealVector& theta) {
    if (g.dim() != 2 || g.count() != 2)
        throw InvalidInput("orthonormalize_generators_qubit: needs two qubit generators");
    auto heff = effective_generators(g, theta);

    const Eigen::Vector3d alpha = pauli_coords(heff[0]);
    const Eigen::Vector3d beta = pauli_coords(heff[1]);
    if (alpha.norm() < 1e-12) throw DegenerateModel("orthonormalize: H1^eff vanishes");

    const double x = alpha.dot(beta) / alpha.squaredNorm();
    HermitianMatrix h2_perp(ComplexMatrix(heff[1].mat() - x * heff[0].mat()));
    const double n1 = (heff[0].mat() * heff[0].mat()).trace().real();
    const double n2 = (h2_perp.mat() * h2_perp.mat()).trace().real();
    if (n2 < 1e-12) throw DegenerateModel("orthonormalize: generators are linearly dependent");

    // delta-theta' = J delta-theta reproduces the original encoding with the
    // rescaled generators: theta.H^eff = theta'.H~.
    Eigen::Matrix2d jac;
    jac << n1, n1 * x, 0.0, n2;

    std::vector<HermitianMatrix> out;
    out.emplace_back(ComplexMatrix(heff[0].mat() / n1));
    out.emplace_back(ComplexMatrix(h2_perp.mat() / n2));
    return OrthonormalizedQubitGenerators{GeneratorSet(std::move(out)), jac};
}

}  // namespace qincompat::model
