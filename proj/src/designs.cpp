#include "qincompat/designs.hpp"

#include <cmath>

namespace qincompat::designs {

using matcore::eig_hermitian;
using matcore::kron;
using model::DensityMatrix;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::CompatibleByA: return "compatible-by-A";
        case Verdict::CompatibleBySdp: return "compatible-by-sdp";
        case Verdict::Incompatible: return "incompatible";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

ComplexVector max_entangled_state(Eigen::Index dim) {
    if (dim < 2) throw InvalidInput("max_entangled_state: D >= 2 required");
    ComplexVector psi = ComplexVector::Zero(dim * dim);
    const double w = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) psi[i * dim + i] = w;
    return psi;
}

namespace {

GeneratorSet lift_second_factor(const GeneratorSet& gens) {
    std::vector<HermitianMatrix> lifted;
    const ComplexMatrix id = matcore::identity(gens.dim());
    for (int j = 0; j < gens.count(); ++j)
        lifted.emplace_back(kron(id, gens[j].mat()));
    return GeneratorSet(std::move(lifted));
}

GeneratorSet lift_both_factors(const GeneratorSet& gens) {
    std::vector<HermitianMatrix> lifted;
    const ComplexMatrix id = matcore::identity(gens.dim());
    for (int j = 0; j < gens.count(); ++j)
        lifted.emplace_back(kron(gens[j].mat(), id) + kron(id, gens[j].mat()));
    return GeneratorSet(std::move(lifted));
}

}  // namespace

StatisticalModel ancilla_model(const GeneratorSet& gens, const RealVector& theta,
                               const NoiseSpec& noise) {
    return StatisticalModel(DensityMatrix::pure(max_entangled_state(gens.dim())),
                            lift_second_factor(gens), noise, theta);
}

StatisticalModel double_model(const GeneratorSet& gens, const RealVector& theta,
                              const NoiseSpec& noise) {
    return StatisticalModel(DensityMatrix::pure(max_entangled_state(gens.dim())),
                            lift_both_factors(gens), noise, theta);
}

AntiparallelSpec AntiparallelSpec::simple(int blocks) {
    AntiparallelSpec spec;
    for (int j = 1; j <= blocks; ++j) {
        spec.subset.push_back(j);
        spec.signs.push_back(0);
        spec.phases1.push_back(0.0);
        spec.phases2.push_back(0.0);
    }
    return spec;
}

AntiparallelPair antiparallel_pair(const HermitianMatrix& h1eff, const HermitianMatrix& h2eff,
                                   const AntiparallelSpec& spec) {
    if (h1eff.dim() != h2eff.dim()) throw InvalidInput("antiparallel_pair: dimension mismatch");
    const Eigen::Index dim = h1eff.dim();
    if (spec.subset.empty()) throw InvalidInput("antiparallel_pair: empty subset");
    if (spec.signs.size() != spec.subset.size() || spec.phases1.size() != spec.subset.size() ||
        spec.phases2.size() != spec.subset.size())
        throw InvalidInput("antiparallel_pair: subset/signs/phases length mismatch");

    // The commutator is skew-Hermitian; -i [H1, H2] is Hermitian with spectrum
    // {+/- a_j} (and a zero for odd D).
    ComplexMatrix comm = h1eff.mat() * h2eff.mat() - h2eff.mat() * h1eff.mat();
    HermitianMatrix c(Complex(0, -1) * comm);
    auto ed = eig_hermitian(c);
    const double scale = ed.eigenvalues.cwiseAbs().maxCoeff();
    if (scale < 1e-12)
        throw NoConstructionNeeded("antiparallel_pair: commutator vanishes, model compatible");

    // Pair eigenvalues by magnitude, largest block first. Ascending order puts
    // -a_j at the front and +a_j at the back.
    const Eigen::Index nblocks = dim / 2;
    struct Block {
        double a;
        ComplexVector plus, minus;
    };
    std::vector<Block> blocks;
    for (Eigen::Index j = 0; j < nblocks; ++j) {
        Block blk;
        const Eigen::Index ip = dim - 1 - j;  // +a_j, descending magnitude
        const Eigen::Index im = j;            // -a_j
        blk.a = ed.eigenvalues[ip];
        if (std::abs(ed.eigenvalues[ip] + ed.eigenvalues[im]) > 1e-10 * std::max(1.0, scale))
            throw DegenerateModel("antiparallel_pair: spectrum is not +/- paired");
        blk.plus = ed.eigenvectors.col(ip);
        blk.minus = ed.eigenvectors.col(im);
        // Deterministic phase: first component of sizable magnitude made real positive.
        for (ComplexVector* v : {&blk.plus, &blk.minus}) {
            Eigen::Index imax = 0;
            v->cwiseAbs().maxCoeff(&imax);
            *v *= std::polar(1.0, -std::arg((*v)[imax]));
        }
        blocks.push_back(std::move(blk));
    }

    ComplexVector psi1 = ComplexVector::Zero(dim);
    ComplexVector psi2 = ComplexVector::Zero(dim);
    for (std::size_t k = 0; k < spec.subset.size(); ++k) {
        const int j = spec.subset[k];
        if (j < 1 || j > static_cast<int>(nblocks))
            throw InvalidInput("antiparallel_pair: block index out of range");
        const Block& blk = blocks[static_cast<std::size_t>(j - 1)];
        if (blk.a <= 1e-10 * scale)
            throw InvalidInput("antiparallel_pair: requested block has zero commutator weight");
        const bool flip = spec.signs[k] != 0;
        psi1 += std::polar(1.0, spec.phases1[k]) * (flip ? blk.minus : blk.plus);
        psi2 += std::polar(1.0, spec.phases2[k]) * (flip ? blk.plus : blk.minus);
    }
    if (spec.include_null_vector) {
        if (dim % 2 == 0)
            throw InvalidInput("antiparallel_pair: no null eigenvector for even D");
        // The remaining eigenvector, at the centre of the ascending spectrum.
        psi1 += ed.eigenvectors.col(nblocks);
    }
    psi1.normalize();
    psi2.normalize();
    return AntiparallelPair{psi1, psi2};
}

CompatibilityCertificate basis_product_compatibility(const std::vector<ComplexVector>& states,
                                                     const GeneratorSet& gens,
                                                     const RealVector& theta) {
    const Eigen::Index dim = gens.dim();
    if (static_cast<Eigen::Index>(states.size()) != dim)
        throw InvalidInput("basis_product_compatibility: need D states");
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (states[i].size() != dim)
            throw InvalidInput("basis_product_compatibility: state dimension mismatch");
        for (Eigen::Index j = 0; j <= i; ++j) {
            const Complex ov = states[j].adjoint() * states[i];
            const double target = i == j ? 1.0 : 0.0;
            if (std::abs(std::abs(ov) - target) > 1e-10)
                throw InvalidInput("basis_product_compatibility: states are not orthonormal");
        }
    }

    ComplexVector product = states[0];
    for (Eigen::Index i = 1; i < dim; ++i) {
        ComplexVector next(product.size() * dim);
        for (Eigen::Index a = 0; a < product.size(); ++a)
            for (Eigen::Index b = 0; b < dim; ++b) next[a * dim + b] = product[a] * states[i][b];
        product = next;
    }

    StatisticalModel model(DensityMatrix::pure(product),
                           model::lift_local_generators(gens, static_cast<int>(dim)),
                           NoiseSpec::none(), theta);
    return certify(model, /*run_sdp=*/false);
}

CompatibilityCertificate certify(const StatisticalModel& model, bool run_sdp,
                                 const holevo::HolevoOptions& opts) {
    auto enc = model::encode(model);
    auto bundle = estimation::info_bundle(enc);
    CompatibilityCertificate cert;
    cert.a_norm = bundle.commutator.norm();
    if (cert.a_norm <= 1e-10) {
        cert.verdict = Verdict::CompatibleByA;
        return cert;
    }
    if (run_sdp) {
        auto report = holevo::r_figure(enc, opts);
        cert.sdp_r = report.r;
        if (report.r <= 1.0 + 1e-6) {
            cert.verdict = Verdict::CompatibleBySdp;
        } else if (report.r > 1.0 + 1e-4) {
            cert.verdict = Verdict::Incompatible;
        } else {
            cert.verdict = Verdict::Inconclusive;  // inside the solver-tolerance band
        }
        return cert;
    }
    cert.verdict = Verdict::Inconclusive;
    return cert;
}

}  // namespace qincompat::designs
