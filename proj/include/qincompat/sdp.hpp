#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qincompat/matcore.hpp"

namespace qincompat::sdp {

// Dense semidefinite programming at desk scale:
//
//   minimize    c^T x
//   subject to  E x = f
//               B_k + sum_i x_i A_{k,i}  >= 0   (one PSD block per constraint)
//
// Scalar unknowns x come from named scalar and symmetric-matrix variables.
// Affine maps are supplied as callables and compiled to coefficient matrices
// by probing; complex Hermitian blocks are realified before solving.
//
// The solver is an infeasible-start primal-dual path-following interior point
// method with Nesterov-Todd scaling and a Mehrotra corrector. Per-iteration
// cost is dominated by the Schur complement of the Newton system, which is
// built by the kernels in sdp_kernels.hpp (OpenMP, with a serial reference
// used by the tests).

enum class Status { Optimal, Infeasible, MaxIterations, NumericalFailure };

std::string to_string(Status s);

struct SolveOptions {
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iter = 200;
    int threads = 0;  // 0: use all available
    bool verbose = false;
};

enum class VarKind { Scalar, ScalarBlock, Symmetric };

struct VarHandle {
    int offset = 0;  // first scalar unknown
    int count = 0;   // number of scalar unknowns
    int size = 0;    // matrix size for Symmetric, element count for ScalarBlock
    VarKind kind = VarKind::Scalar;
};

// Read-only view of a point in variable space, as seen by the affine-map callables.
class Assignment {
  public:
    explicit Assignment(const RealVector& x) : x_(x) {}

    double scalar(const VarHandle& h) const;
    RealVector scalars(const VarHandle& h) const;
    RealMatrix symmetric(const VarHandle& h) const;

  private:
    const RealVector& x_;
};

struct SdpSolution {
    Status status = Status::NumericalFailure;
    RealVector x;           // all scalar unknowns
    double objective = 0.0;
    double dual_objective = 0.0;
    double duality_gap = 0.0;   // certified <S, Z> at the returned point
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double min_block_eig = 0.0;  // most negative eigenvalue over PSD blocks at x
    int iterations = 0;
    std::string message;

    double scalar(const VarHandle& h) const { return Assignment(x).scalar(h); }
    RealVector scalars(const VarHandle& h) const { return Assignment(x).scalars(h); }
    RealMatrix symmetric(const VarHandle& h) const { return Assignment(x).symmetric(h); }
};

// The real symmetric embedding [[Re M, -Im M], [Im M, Re M]] of a Hermitian
// matrix; positive semidefinite exactly when M is, with doubled multiplicities.
RealMatrix realify_hermitian_psd(const ComplexMatrix& m);

class SdpProblem {
  public:
    VarHandle add_scalar(const std::string& name);
    VarHandle add_scalar_block(const std::string& name, int count);
    VarHandle add_symmetric(const std::string& name, int size);

    void set_objective(std::function<double(const Assignment&)> fn);

    void add_psd(const std::string& name, int size,
                 std::function<RealMatrix(const Assignment&)> fn);
    void add_psd_hermitian(const std::string& name, int size,
                           std::function<ComplexMatrix(const Assignment&)> fn);

    void add_equalities(const std::string& name, int count,
                        std::function<RealVector(const Assignment&)> fn, const RealVector& rhs);

    int scalar_count() const { return n_scalars_; }

    SdpSolution solve(const SolveOptions& opts = {}) const;

  private:
    struct PsdSpec {
        std::string name;
        int size;
        bool hermitian;
        std::function<RealMatrix(const Assignment&)> real_fn;
        std::function<ComplexMatrix(const Assignment&)> cplx_fn;
    };
    struct EqSpec {
        std::string name;
        int count;
        std::function<RealVector(const Assignment&)> fn;
        RealVector rhs;
    };

    int n_scalars_ = 0;
    std::vector<std::pair<std::string, VarHandle>> vars_;
    std::function<double(const Assignment&)> objective_;
    std::vector<PsdSpec> psd_;
    std::vector<EqSpec> eq_;
};

}  // namespace qincompat::sdp
