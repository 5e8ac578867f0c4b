#include <doctest.h>

#include "qincompat/matcore.hpp"
#include "support.hpp"

using namespace qincompat;
using namespace qincompat::matcore;
using testsupport::GaussLegendre;

namespace {
const ComplexMatrix kSx = pauli_x();
const ComplexMatrix kSy = pauli_y();
const ComplexMatrix kSz = pauli_z();
}  // namespace

TEST_CASE("eig_hermitian basics") {
    auto ed = eig_hermitian(HermitianMatrix(identity(2)));
    CHECK(ed.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(ed.eigenvalues[1] == doctest::Approx(1.0));

    ed = eig_hermitian(HermitianMatrix(kSz));
    CHECK(ed.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(ed.eigenvalues[1] == doctest::Approx(1.0));

    ed = eig_hermitian(HermitianMatrix(kSx));
    CHECK(ed.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(ed.eigenvalues[1] == doctest::Approx(1.0));
    // eigenvectors (1, -/+1)/sqrt(2) up to phase
    for (int c = 0; c < 2; ++c)
        CHECK(std::abs(std::abs(ed.eigenvectors(0, c)) - 1.0 / std::sqrt(2.0)) < 1e-12);

    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        auto m = testsupport::random_hermitian(2 + rep % 5, rng);
        auto e = eig_hermitian(m);
        ComplexMatrix rebuilt =
            e.eigenvectors * e.eigenvalues.cast<Complex>().asDiagonal() * e.eigenvectors.adjoint();
        CHECK((rebuilt - m.mat()).norm() <= 1e-10 * std::max(1.0, m.mat().norm()));
        CHECK((e.eigenvectors.adjoint() * e.eigenvectors -
               ComplexMatrix::Identity(m.dim(), m.dim()))
                  .norm() < 1e-10);
        for (Eigen::Index i = 0; i + 1 < e.eigenvalues.size(); ++i)
            CHECK(e.eigenvalues[i] <= e.eigenvalues[i + 1] + 1e-14);
    }
}

TEST_CASE("psd_power") {
    ComplexMatrix d49 = ComplexMatrix::Zero(2, 2);
    d49(0, 0) = 4.0;
    d49(1, 1) = 9.0;
    auto inv_sqrt = psd_power(HermitianMatrix(d49), -0.5);
    CHECK(inv_sqrt.mat()(0, 0).real() == doctest::Approx(0.5));
    CHECK(inv_sqrt.mat()(1, 1).real() == doctest::Approx(1.0 / 3.0));

    auto id_pow = psd_power(HermitianMatrix(identity(3)), 0.7);
    CHECK((id_pow.mat() - identity(3)).norm() < 1e-12);

    ComplexMatrix d40 = ComplexMatrix::Zero(2, 2);
    d40(0, 0) = 4.0;
    CHECK_THROWS_AS(psd_power(HermitianMatrix(d40), -0.5), SingularMatrix);

    // square root of a square reproduces the square
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        auto m = testsupport::random_hermitian(3, rng);
        HermitianMatrix m2(ComplexMatrix(m.mat() * m.mat()));
        auto back = psd_power(psd_power(m2, 0.5), 2.0);
        CHECK((back.mat() - m2.mat()).norm() < 1e-8);
    }
}

TEST_CASE("operator_norm") {
    ComplexMatrix d(2, 2);
    d << 1, 0, 0, -3;
    CHECK(operator_norm(d) == doctest::Approx(3.0));
    CHECK(operator_norm(ComplexMatrix::Zero(3, 3)) == doctest::Approx(0.0));

    // [[0,-4],[4,0]]: A A^T = 16 I, both singular values 4
    ComplexMatrix a(2, 2);
    a << 0, -4, 4, 0;
    CHECK(operator_norm(a) == doctest::Approx(4.0));
}

TEST_CASE("trace_abs") {
    CHECK(trace_abs(HermitianMatrix(identity(2)), HermitianMatrix(kSz)) == doctest::Approx(2.0));
    CHECK(trace_abs(HermitianMatrix(ComplexMatrix::Zero(2, 2)), HermitianMatrix(kSz)) ==
          doctest::Approx(0.0));

    // G = diag(1,0), R = sigma_x: sqrt(G) R sqrt(G) has no diagonal support
    ComplexMatrix g = ComplexMatrix::Zero(2, 2);
    g(0, 0) = 1.0;
    CHECK(trace_abs(HermitianMatrix(g), HermitianMatrix(kSx)) == doctest::Approx(0.0));

    ComplexMatrix neg = -identity(2);
    CHECK_THROWS_AS(trace_abs(HermitianMatrix(neg), HermitianMatrix(kSz)), InvalidInput);

    // Tr Abs = plain trace when the sandwich is PSD; nuclear norm at G = 1
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        auto r = testsupport::random_hermitian(4, rng);
        auto ed = eig_hermitian(r);
        CHECK(trace_abs(HermitianMatrix(identity(4)), r) ==
              doctest::Approx(ed.eigenvalues.cwiseAbs().sum()).epsilon(1e-10));
        HermitianMatrix r2(ComplexMatrix(r.mat() * r.mat()));  // PSD
        auto g2 = testsupport::random_hermitian(4, rng);
        HermitianMatrix gpsd(ComplexMatrix(g2.mat() * g2.mat()));
        // sqrt(G) R2 sqrt(G) >= 0, so TrAbs[G R2] = Tr[G R2]
        const double plain = (gpsd.mat() * r2.mat()).trace().real();
        CHECK(trace_abs(gpsd, r2) == doctest::Approx(plain).epsilon(1e-9));
    }
}

TEST_CASE("expm_i") {
    CHECK((expm_i(HermitianMatrix(ComplexMatrix::Zero(2, 2))) - identity(2)).norm() < 1e-14);

    auto u = expm_i(HermitianMatrix(ComplexMatrix(0.5 * M_PI * kSz)));
    CHECK(std::abs(u(0, 0) - Complex(0, 1)) < 1e-12);
    CHECK(std::abs(u(1, 1) - Complex(0, -1)) < 1e-12);

    // series-summation oracle for exp(i (pi/2) sigma_x)
    HermitianMatrix h(ComplexMatrix(0.5 * M_PI * kSx));
    ComplexMatrix series = ComplexMatrix::Zero(2, 2);
    ComplexMatrix term = identity(2);
    for (int k = 0; k < 60; ++k) {
        series += term;
        term = term * (Complex(0, 1) * h.mat()) / static_cast<double>(k + 1);
    }
    auto ux = expm_i(h);
    CHECK((ux - series).norm() < 1e-12);
    CHECK((ux - Complex(0, 1) * kSx).norm() < 1e-12);

    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 10; ++rep) {
        auto hr = testsupport::random_hermitian(3, rng);
        auto fwd = expm_i(hr);
        auto bwd = expm_i(HermitianMatrix(ComplexMatrix(-hr.mat())));
        CHECK((fwd * bwd - identity(3)).norm() < 1e-10);
        CHECK((fwd * fwd.adjoint() - identity(3)).norm() < 1e-10);
    }
}

TEST_CASE("averaged_conjugation") {
    CHECK((averaged_conjugation(HermitianMatrix(ComplexMatrix::Zero(2, 2)), HermitianMatrix(kSy))
               .mat() -
           kSy)
              .norm() < 1e-14);
    CHECK((averaged_conjugation(HermitianMatrix(kSz), HermitianMatrix(kSz)).mat() - kSz).norm() <
          1e-13);

    // Quadrature and finite-difference oracles first, then the frozen value.
    GaussLegendre quad;
    HermitianMatrix h(ComplexMatrix(0.25 * M_PI * kSy));
    HermitianMatrix k(kSz);
    ComplexMatrix oracle = quad.integrate(2, [&](double s) {
        ComplexMatrix um = expm_i(HermitianMatrix(ComplexMatrix(-s * h.mat())));
        ComplexMatrix up = expm_i(HermitianMatrix(ComplexMatrix(s * h.mat())));
        return ComplexMatrix(um * k.mat() * up);
    });
    auto got = averaged_conjugation(h, k);
    CHECK((got.mat() - oracle).norm() < 1e-10);

    // d/dt exp(i(H + t K))|0 = U * i * averaged_conjugation(H, K)
    const double step = 1e-6;
    ComplexMatrix up = expm_i(HermitianMatrix(ComplexMatrix(h.mat() + step * k.mat())));
    ComplexMatrix um = expm_i(HermitianMatrix(ComplexMatrix(h.mat() - step * k.mat())));
    ComplexMatrix du = (up - um) / (2.0 * step);
    ComplexMatrix u = expm_i(h);
    CHECK((du - u * (Complex(0, 1) * got.mat())).norm() < 1e-8);

    // Frozen closed form of the rotation integral, as the oracles produce it:
    // (2/pi) (sigma_z + sigma_x).
    ComplexMatrix closed = (2.0 / M_PI) * (kSz + kSx);
    CHECK((got.mat() - closed).norm() < 1e-12);

    // matches the quadrature on random inputs
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 8; ++rep) {
        const Eigen::Index dim = 2 + rep % 3;
        auto hr = testsupport::random_hermitian(dim, rng);
        auto kr = testsupport::random_hermitian(dim, rng);
        ComplexMatrix q = quad.integrate(dim, [&](double s) {
            ComplexMatrix um = expm_i(HermitianMatrix(ComplexMatrix(-s * hr.mat())));
            return ComplexMatrix(um * kr.mat() * um.adjoint());
        });
        CHECK((averaged_conjugation(hr, kr).mat() - q).norm() < 1e-8);
    }
}

TEST_CASE("phi divided difference near zero") {
    // Taylor branch agrees with the direct formula just above the threshold.
    for (double w : {2e-4, 1e-3}) {
        Complex direct = (std::exp(Complex(0, w)) - 1.0) / Complex(0, w);
        CHECK(std::abs(phi_divided_difference(Complex(0, w)) - direct) < 1e-14);
    }
    CHECK(std::abs(phi_divided_difference(Complex(0, 0)) - 1.0) < 1e-15);
}

TEST_CASE("kron") {
    CHECK((kron(identity(2), identity(2)) - identity(4)).norm() < 1e-15);

    ComplexMatrix zi = kron(kSz, identity(2));
    RealVector expected(4);
    expected << 1, 1, -1, -1;
    for (int i = 0; i < 4; ++i) CHECK(zi(i, i).real() == doctest::Approx(expected[i]));

    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    ComplexMatrix block = kron(p0, kSx);
    CHECK((block.topLeftCorner(2, 2) - kSx).norm() < 1e-15);
    CHECK(block.bottomRightCorner(2, 2).norm() == doctest::Approx(0.0));
}

TEST_CASE("partial_trace") {
    std::mt19937_64 rng(41);
    auto rho = testsupport::random_hermitian(2, rng).mat();
    auto sigma = testsupport::random_hermitian(3, rng).mat();
    auto traced = partial_trace(kron(rho, sigma), {2, 3}, 1);
    CHECK((traced - sigma.trace() * rho).norm() < 1e-12);

    ComplexMatrix id4 = identity(4) / 4.0;
    CHECK((partial_trace(id4, {2, 2}, 0) - identity(2) / 2.0).norm() < 1e-14);

    ComplexVector bell(4);
    bell << 1, 0, 0, 1;
    bell /= std::sqrt(2.0);
    ComplexMatrix bell_rho = bell * bell.adjoint();
    CHECK((partial_trace(bell_rho, {2, 2}, 1) - identity(2) / 2.0).norm() < 1e-14);

    // trace preserved, middle site of three
    auto m = testsupport::random_hermitian(12, rng).mat();
    auto t = partial_trace(m, {2, 3, 2}, 1);
    CHECK(std::abs(t.trace() - m.trace()) < 1e-12);
    CHECK_THROWS_AS(partial_trace(m, {2, 3, 2}, 3), InvalidInput);
    CHECK_THROWS_AS(partial_trace(m, {2, 2, 2}, 0), InvalidInput);
}

TEST_CASE("fidelity") {
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 5; ++rep) {
        auto g = testsupport::random_complex(3, 3, rng);
        ComplexMatrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
    }

    ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    CHECK(fidelity(p0, p1) == doctest::Approx(0.0));
    CHECK(fidelity(identity(2) / 2.0, p0) == doctest::Approx(0.5));

    CHECK_THROWS_AS(fidelity(ComplexMatrix(-p0), p1), InvalidInput);
}

TEST_CASE("hermitian construction symmetrizes and rejects") {
    ComplexMatrix slightly(2, 2);
    slightly << 1.0, Complex(0.5, 1e-13), Complex(0.5, -1e-13 + 2e-13), -1.0;
    HermitianMatrix h(slightly);
    CHECK((h.mat() - h.mat().adjoint()).norm() == doctest::Approx(0.0));

    ComplexMatrix bad(2, 2);
    bad << 1.0, 2.0, -2.0, 1.0;  // asymmetry far above tolerance
    CHECK_THROWS_AS((void)HermitianMatrix{bad}, InvalidInput);
}
