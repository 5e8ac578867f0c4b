#pragma once

// Shared helpers for the test suites: deterministic random models, the
// quadrature and finite-difference oracles, and small constructors.

#include <random>
#include <vector>

#include "qincompat/model.hpp"

namespace testsupport {

using namespace qincompat;

inline ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(rng), normal(rng));
    return m;
}

inline HermitianMatrix random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
    ComplexMatrix m = random_complex(dim, dim, rng);
    return HermitianMatrix(ComplexMatrix(0.5 * (m + m.adjoint())));
}

inline HermitianMatrix random_traceless_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
    ComplexMatrix m = random_hermitian(dim, rng).mat();
    m -= (m.trace() / static_cast<double>(dim)) * ComplexMatrix::Identity(dim, dim);
    return HermitianMatrix(m);
}

inline ComplexVector random_state(Eigen::Index dim, std::mt19937_64& rng) {
    ComplexVector v = random_complex(dim, 1, rng);
    v.normalize();
    return v;
}

// Random full-rank density matrix with purity bounded away from both ends.
inline model::DensityMatrix random_mixed_state(Eigen::Index dim, std::mt19937_64& rng) {
    ComplexMatrix g = random_complex(dim, dim + 2, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return model::DensityMatrix(rho);
}

inline model::GeneratorSet random_generators(Eigen::Index dim, int d, std::mt19937_64& rng) {
    std::vector<HermitianMatrix> gens;
    for (int j = 0; j < d; ++j) gens.push_back(random_traceless_hermitian(dim, rng));
    return model::GeneratorSet(std::move(gens));
}

inline RealVector random_theta(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    RealVector t(d);
    for (int i = 0; i < d; ++i) t[i] = uni(rng);
    return t;
}

// 128-point Gauss-Legendre rule on [0, 1], nodes by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes, weights;

    explicit GaussLegendre(int n = 128) {
        nodes.resize(n);
        weights.resize(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = 0.5 * (1.0 - x);  // map [-1,1] -> [0,1], ascending
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    // integral over [0,1] of a matrix-valued function
    template <typename F>
    ComplexMatrix integrate(Eigen::Index dim, F&& f) const {
        ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// Central finite difference of the full encoding map, h = 1e-5.
inline ComplexMatrix finite_difference_drho(const model::StatisticalModel& m, int j,
                                            double h = 1e-5) {
    auto at = [&](double delta) {
        RealVector theta = m.theta;
        theta[j] += delta;
        model::StatisticalModel shifted(m.probe, m.generators, m.noise, theta);
        auto enc = model::encode(shifted);
        return enc.rho_theta.mat();
    };
    return (at(h) - at(-h)) / (2.0 * h);
}

}  // namespace testsupport
