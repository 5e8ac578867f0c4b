// Timing comparison of the Schur-complement kernel: dense serial reference vs
// the structured kernel, single- and multi-threaded. The synthetic problem
// mirrors the Holevo program shape: many low-rank coefficients plus a few
// dense ones on a moderately sized block.

#include <chrono>
#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qincompat/sdp_kernels.hpp"

using namespace qincompat;
using namespace qincompat::sdp::kernels;

namespace {

BlockData make_block(int n, int n_lowrank, int n_dense, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    BlockData block;
    block.size = n;
    block.constant = RealMatrix::Identity(n, n);
    int var = 0;
    for (int k = 0; k < n_lowrank; ++k) {
        RealVector u(n), v(n);
        for (int i = 0; i < n; ++i) {
            u[i] = normal(rng);
            v[i] = normal(rng);
        }
        RealMatrix a = u * v.transpose() + v * u.transpose();
        block.coeffs.push_back(compress_coefficient(var++, a));
    }
    for (int k = 0; k < n_dense; ++k) {
        RealMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
        RealMatrix sym = 0.5 * (a + a.transpose());
        block.coeffs.push_back(compress_coefficient(var++, sym));
    }
    return block;
}

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    const int n = 160;
    const int n_lowrank = 140;
    const int n_dense = 10;
    const int m = n_lowrank + n_dense;
    const int reps = 5;

    std::mt19937_64 rng(7);
    BlockData block = make_block(n, n_lowrank, n_dense, rng);

    std::normal_distribution<double> normal(0.0, 1.0);
    RealMatrix w(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = normal(rng);
    RealMatrix winv = w * w.transpose() + 0.1 * static_cast<double>(n) * RealMatrix::Identity(n, n);

    RealMatrix h_ref = RealMatrix::Zero(m, m);
    const double t_ref = time_ms(
        [&] {
            h_ref.setZero();
            schur_accumulate_reference(block, winv, h_ref);
        },
        reps);

    RealMatrix h1 = RealMatrix::Zero(m, m);
    const double t1 = time_ms(
        [&] {
            h1.setZero();
            schur_accumulate(block, winv, h1, 1);
        },
        reps);

#ifdef _OPENMP
    const int nthreads = omp_get_max_threads();
#else
    const int nthreads = 1;
#endif
    RealMatrix hp = RealMatrix::Zero(m, m);
    const double tp = time_ms(
        [&] {
            hp.setZero();
            schur_accumulate(block, winv, hp, nthreads);
        },
        reps);

    const double err1 = (h1 - h_ref).norm() / h_ref.norm();
    const double errp = (hp - h_ref).norm() / h_ref.norm();

    std::printf("Schur kernel, block %d x %d, %d coefficients (%d low-rank, %d dense)\n", n, n, m,
                n_lowrank, n_dense);
    std::printf("  dense reference (serial)   %10.2f ms\n", t_ref);
    std::printf("  structured, 1 thread       %10.2f ms   (%.1fx vs reference, rel err %.2e)\n",
                t1, t_ref / t1, err1);
    std::printf("  structured, %d threads      %10.2f ms   (%.1fx vs 1 thread,  rel err %.2e)\n",
                nthreads, tp, t1 / tp, errp);
    return (err1 < 1e-10 && errp < 1e-10) ? 0 : 1;
}
