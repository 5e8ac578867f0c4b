#pragma once

#include <optional>
#include <vector>

#include "qincompat/matcore.hpp"

namespace qincompat::model {

// D x D density matrix: Hermitian, PSD up to the clamp tolerance, unit trace.
class DensityMatrix {
  public:
    explicit DensityMatrix(const ComplexMatrix& m);
    static DensityMatrix pure(const ComplexVector& psi);
    static DensityMatrix maximally_mixed(Eigen::Index dim);

    const ComplexMatrix& mat() const { return m_.mat(); }
    Eigen::Index dim() const { return m_.dim(); }
    double purity() const { return (mat() * mat()).trace().real(); }

  private:
    explicit DensityMatrix(HermitianMatrix m) : m_(std::move(m)) {}
    HermitianMatrix m_;
};

// The d traceless Hermitian generators H_j of a unitary encoding.
class GeneratorSet {
  public:
    explicit GeneratorSet(std::vector<HermitianMatrix> gens);

    Eigen::Index dim() const { return gens_.front().dim(); }
    int count() const { return static_cast<int>(gens_.size()); }
    const HermitianMatrix& operator[](int j) const { return gens_.at(j); }
    const std::vector<HermitianMatrix>& all() const { return gens_; }

  private:
    std::vector<HermitianMatrix> gens_;
};

enum class NoiseKind { None, GlobalDepolarizing, LocalDepolarizing };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double lambda = 1.0;
    std::vector<Eigen::Index> site_dims;  // local kind only; all sites must be qubits

    static NoiseSpec none();
    static NoiseSpec global_depolarizing(double lambda);
    static NoiseSpec local_depolarizing(double lambda, std::vector<Eigen::Index> site_dims);

    // Admissible lambda interval for a given total dimension.
    void validate(Eigen::Index dim) const;
};

struct StatisticalModel {
    DensityMatrix probe;
    GeneratorSet generators;
    NoiseSpec noise;
    RealVector theta;

    StatisticalModel(DensityMatrix probe, GeneratorSet generators, NoiseSpec noise,
                     RealVector theta);
    Eigen::Index dim() const { return probe.dim(); }
    int parameter_count() const { return generators.count(); }
};

// The encoded state together with its analytic parameter derivatives.
struct EncodedModel {
    DensityMatrix rho_theta;
    std::vector<HermitianMatrix> drho;                 // traceless Hermitian d(rho)/d(theta_j)
    std::vector<HermitianMatrix> effective_generators;

    Eigen::Index dim() const { return rho_theta.dim(); }
    int parameter_count() const { return static_cast<int>(drho.size()); }
};

ComplexMatrix build_unitary(const GeneratorSet& g, const RealVector& theta);

DensityMatrix apply_depolarizing(const DensityMatrix& rho, double lambda);

DensityMatrix apply_local_depolarizing(const DensityMatrix& rho, double lambda,
                                       const std::vector<Eigen::Index>& site_dims);

DensityMatrix apply_noise(const DensityMatrix& rho, const NoiseSpec& noise);

// H_j^eff(theta) with d/dtheta_j U_theta = U_theta * (i H_j^eff).
std::vector<HermitianMatrix> effective_generators(const GeneratorSet& g, const RealVector& theta);

EncodedModel encode(const StatisticalModel& model);

// Sum over sites of 1 x ... x H_j x ... x 1, one copy of each generator per site.
GeneratorSet lift_local_generators(const GeneratorSet& local, int n_sites);

struct OrthonormalizedQubitGenerators {
    GeneratorSet generators;  // orthogonal ({G1,G2} = 0), rescaled per the reparametrization
    Eigen::Matrix2d jacobian;  // delta-theta -> delta-theta' of the same encoding
};

// Two-parameter qubit reparametrization that makes the effective generators
// anticommute. Throws DegenerateModel when H1^eff vanishes or the pair is
// linearly dependent.
OrthonormalizedQubitGenerators orthonormalize_generators_qubit(const GeneratorSet& g,
                                                               const RealVector& theta);

}  // namespace qincompat::model
