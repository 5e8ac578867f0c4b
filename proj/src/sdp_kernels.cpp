#include "qincompat/sdp_kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qincompat::sdp::kernels {

Coefficient compress_coefficient(int var, const RealMatrix& a) {
    Coefficient c;
    c.var = var;
    const Eigen::Index n = a.rows();
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        c.V = RealMatrix::Zero(n, 0);
        c.d = RealVector::Zero(0);
        return c;
    }

    const Eigen::Index probes = std::min<Eigen::Index>(n, 12);
    // Fixed-seed probe directions keep the factorization deterministic.
    std::mt19937_64 rng(0x5db5600dULL + static_cast<unsigned long long>(var));
    std::normal_distribution<double> normal(0.0, 1.0);
    RealMatrix omega(n, probes);
    for (Eigen::Index j = 0; j < probes; ++j)
        for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = normal(rng);

    RealMatrix y = a * omega;
    Eigen::ColPivHouseholderQR<RealMatrix> qr(y);
    qr.setThreshold(1e-12);
    const Eigen::Index rank = qr.rank();
    if (rank == 0 || rank > n / 3 || probes - rank < 2) {
        c.dense = a;
        return c;  // not usefully low-rank (or the probe count left no margin)
    }
    RealMatrix qfull = qr.householderQ();
    RealMatrix qthin = qfull.leftCols(rank);

    RealMatrix small = qthin.transpose() * a * qthin;
    // Exactness check: the factorization must reproduce a, otherwise store dense.
    if ((a - qthin * small * qthin.transpose()).norm() > 1e-12 * a.norm()) {
        c.dense = a;
        return c;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(small);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < rank; ++i)
        if (std::abs(es.eigenvalues()[i]) > 1e-14 * scale) keep.push_back(i);
    c.V.resize(n, static_cast<Eigen::Index>(keep.size()));
    c.d.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        c.V.col(static_cast<Eigen::Index>(k)) = qthin * es.eigenvectors().col(keep[k]);
        c.d[static_cast<Eigen::Index>(k)] = es.eigenvalues()[keep[k]];
    }
    return c;
}

RealMatrix apply_map(const BlockData& block, const RealVector& x) {
    RealMatrix out = RealMatrix::Zero(block.size, block.size);
    for (const auto& c : block.coeffs) {
        const double xi = x[c.var];
        if (xi == 0.0) continue;
        if (c.low_rank())
            out.noalias() += xi * (c.V * c.d.asDiagonal() * c.V.transpose());
        else
            out.noalias() += xi * c.dense;
    }
    return out;
}

void adjoint_accumulate(const BlockData& block, const RealMatrix& z, RealVector& out) {
    for (const auto& c : block.coeffs) {
        if (c.low_rank()) {
            double sum = 0.0;
            for (Eigen::Index k = 0; k < c.V.cols(); ++k)
                sum += c.d[k] * c.V.col(k).dot(z * c.V.col(k));
            out[c.var] += sum;
        } else {
            out[c.var] += (c.dense.array() * z.array()).sum();
        }
    }
}

namespace {

int resolve_threads(int threads) {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
    return 1;
#endif
}

}  // namespace

void schur_accumulate(const BlockData& block, const RealMatrix& winv, RealMatrix& h, int threads) {
    const int m = static_cast<int>(block.coeffs.size());
    const int nthreads = resolve_threads(threads);

    // Precompute Winv V_j (low rank) / Winv A_j Winv (dense).
    std::vector<RealMatrix> prepared(m);
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (int j = 0; j < m; ++j) {
        const auto& c = block.coeffs[j];
        if (c.low_rank())
            prepared[j] = winv * c.V;
        else
            prepared[j] = winv * c.dense * winv;
    }

    // H_ij = Tr[A_i Winv A_j Winv]; each (i, j) entry is written exactly once.
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
    for (int j = 0; j < m; ++j) {
        const auto& cj = block.coeffs[j];
        for (int i = 0; i <= j; ++i) {
            const auto& ci = block.coeffs[i];
            double v = 0.0;
            if (ci.low_rank() && cj.low_rank()) {
                // Tr[D_i M D_j M^T] with M = V_i^T Winv V_j.
                RealMatrix mm = ci.V.transpose() * prepared[j];
                for (Eigen::Index a = 0; a < ci.d.size(); ++a)
                    for (Eigen::Index b = 0; b < cj.d.size(); ++b)
                        v += ci.d[a] * cj.d[b] * mm(a, b) * mm(a, b);
            } else if (cj.low_rank()) {
                // i dense: Tr[A_i Winv V_j D_j V_j^T Winv].
                RealMatrix t = prepared[j] * cj.d.asDiagonal() * prepared[j].transpose();
                v = (ci.dense.array() * t.array()).sum();
            } else if (ci.low_rank()) {
                for (Eigen::Index a = 0; a < ci.d.size(); ++a)
                    v += ci.d[a] * ci.V.col(a).dot(prepared[j] * ci.V.col(a));
            } else {
                v = (ci.dense.array() * prepared[j].array()).sum();
            }
            // One coefficient per variable per block: every (var_i, var_j)
            // entry is touched by exactly one (i, j) pair, so no atomics.
            h(ci.var, cj.var) += v;
            if (ci.var != cj.var) h(cj.var, ci.var) += v;
        }
    }
}

void schur_accumulate_reference(const BlockData& block, const RealMatrix& winv, RealMatrix& h) {
    const int m = static_cast<int>(block.coeffs.size());
    std::vector<RealMatrix> dense(m);
    for (int j = 0; j < m; ++j) {
        const auto& c = block.coeffs[j];
        dense[j] = c.low_rank() ? RealMatrix(c.V * c.d.asDiagonal() * c.V.transpose()) : c.dense;
    }
    for (int j = 0; j < m; ++j) {
        RealMatrix t = winv * dense[j] * winv;
        for (int i = 0; i <= j; ++i) {
            const double v = (dense[i].array() * t.array()).sum();
            h(block.coeffs[i].var, block.coeffs[j].var) += v;
            if (block.coeffs[i].var != block.coeffs[j].var)
                h(block.coeffs[j].var, block.coeffs[i].var) += v;
        }
    }
}

void weighted_rhs_accumulate(const BlockData& block, const RealMatrix& q, RealVector& out,
                             int threads) {
    const int m = static_cast<int>(block.coeffs.size());
    const int nthreads = resolve_threads(threads);
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int i = 0; i < m; ++i) {
        const auto& c = block.coeffs[i];
        double sum = 0.0;
        if (c.low_rank()) {
            for (Eigen::Index k = 0; k < c.V.cols(); ++k)
                sum += c.d[k] * c.V.col(k).dot(q * c.V.col(k));
        } else {
            sum = (c.dense.array() * q.array()).sum();
        }
        out[c.var] += sum;
    }
}

}  // namespace qincompat::sdp::kernels
