#pragma once

#include <vector>

#include "qincompat/matcore.hpp"

namespace qincompat::sdp::kernels {

// One variable's coefficient matrix inside one PSD block, either dense or in
// eigenfactor form A = V diag(d) V^T for low-rank coefficients (the common
// case here: an estimator coefficient touches one column of the constraint
// block, giving rank <= 4 after realification).
struct Coefficient {
    int var = 0;
    RealMatrix dense;  // used when V has no columns
    RealMatrix V;      // n x q, orthonormal columns
    RealVector d;      // q eigenvalues
    bool low_rank() const { return V.cols() > 0; }
};

struct BlockData {
    int size = 0;
    RealMatrix constant;                 // B
    std::vector<Coefficient> coeffs;     // one entry per variable present in the block
};

// Factor a probed dense coefficient into Coefficient form. Uses a
// deterministic randomized range finder and falls back to dense storage when
// the rank is not small.
Coefficient compress_coefficient(int var, const RealMatrix& a);

// sum_i x_i A_i over the block's coefficients.
RealMatrix apply_map(const BlockData& block, const RealVector& x);

// out_i += <A_i, Z> for every coefficient of the block.
void adjoint_accumulate(const BlockData& block, const RealMatrix& z, RealVector& out);

// H_ij += Tr[A_i Winv A_j Winv] for all coefficient pairs of the block.
// Exploits the eigenfactor form; parallel over coefficient pairs. Entries are
// assigned independently, so the result is identical for any thread count.
void schur_accumulate(const BlockData& block, const RealMatrix& winv, RealMatrix& h, int threads);

// Dense, serial formation of the same quantity. Reference implementation kept
// for the tests and the kernel benchmark.
void schur_accumulate_reference(const BlockData& block, const RealMatrix& winv, RealMatrix& h);

// out_i += <A_i, Q> for a fixed symmetric Q; parallel over coefficients.
void weighted_rhs_accumulate(const BlockData& block, const RealMatrix& q, RealVector& out,
                             int threads);

}  // namespace qincompat::sdp::kernels
