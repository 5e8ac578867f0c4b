#include <doctest.h>

#include "qincompat/model.hpp"
#include "support.hpp"

using namespace qincompat;
using namespace qincompat::model;
using matcore::identity;
using matcore::kron;
using matcore::pauli_x;
using matcore::pauli_y;
using matcore::pauli_z;

namespace {

GeneratorSet qubit_yz() {
    std::vector<HermitianMatrix> g;
    g.emplace_back(pauli_y());
    g.emplace_back(pauli_z());
    return GeneratorSet(std::move(g));
}

RealVector theta2(double a, double b) {
    RealVector t(2);
    t << a, b;
    return t;
}

}  // namespace

TEST_CASE("density matrix validation") {
    CHECK_THROWS_AS((void)DensityMatrix{ComplexMatrix(2.0 * identity(2))}, InvalidInput);
    ComplexMatrix neg(2, 2);
    neg << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS((void)DensityMatrix{neg}, InvalidInput);

    auto mixed = DensityMatrix::maximally_mixed(4);
    CHECK(mixed.purity() == doctest::Approx(0.25));

    ComplexVector psi(2);
    psi << 3.0, 4.0;  // normalized internally
    auto pure = DensityMatrix::pure(psi);
    CHECK(pure.purity() == doctest::Approx(1.0));
}

TEST_CASE("generator set invariants") {
    std::vector<HermitianMatrix> bad;
    bad.emplace_back(identity(2));  // not traceless
    CHECK_THROWS_AS((void)GeneratorSet{std::move(bad)}, InvalidInput);

    std::mt19937_64 rng(3);
    std::vector<HermitianMatrix> too_many;
    for (int i = 0; i < 4; ++i) too_many.push_back(testsupport::random_traceless_hermitian(2, rng));
    CHECK_THROWS_AS((void)GeneratorSet{std::move(too_many)}, InvalidInput);  // d > D^2 - 1
}

TEST_CASE("build_unitary") {
    auto gens = qubit_yz();
    CHECK((build_unitary(gens, theta2(0, 0)) - identity(2)).norm() < 1e-14);

    // series oracle for exp(i (pi/2) sigma_y) = i sigma_y
    auto u = build_unitary(gens, theta2(M_PI / 2, 0));
    CHECK((u - Complex(0, 1) * pauli_y()).norm() < 1e-12);

    auto both = build_unitary(gens, theta2(0.3, -0.7));
    ComplexMatrix direct =
        matcore::expm_i(HermitianMatrix(ComplexMatrix(0.3 * pauli_y() - 0.7 * pauli_z())));
    CHECK((both - direct).norm() < 1e-14);
    CHECK((both * both.adjoint() - identity(2)).norm() < 1e-10);
}

TEST_CASE("apply_depolarizing") {
    ComplexVector e0(2);
    e0 << 1, 0;
    auto rho = DensityMatrix::pure(e0);

    CHECK((apply_depolarizing(rho, 1.0).mat() - rho.mat()).norm() < 1e-14);
    CHECK((apply_depolarizing(rho, 0.0).mat() - identity(2) / 2.0).norm() < 1e-14);

    auto inverted = apply_depolarizing(rho, -1.0 / 3.0);
    CHECK(inverted.mat()(0, 0).real() == doctest::Approx(1.0 / 3.0));
    CHECK(inverted.mat()(1, 1).real() == doctest::Approx(2.0 / 3.0));

    CHECK_THROWS_AS(apply_depolarizing(rho, -0.4), InvalidInput);
    CHECK_THROWS_AS(apply_depolarizing(rho, 1.1), InvalidInput);

    // Bloch shrinking: purity contraction by lambda^2
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 6; ++rep) {
        auto r = testsupport::random_mixed_state(3, rng);
        const double lam = 0.6;
        auto out = apply_depolarizing(r, lam);
        CHECK(out.purity() - 1.0 / 3.0 ==
              doctest::Approx(lam * lam * (r.purity() - 1.0 / 3.0)).epsilon(1e-10));
    }
}

TEST_CASE("apply_local_depolarizing") {
    std::mt19937_64 rng(9);
    auto r3 = testsupport::random_mixed_state(8, rng);
    const std::vector<Eigen::Index> sites{2, 2, 2};

    CHECK((apply_local_depolarizing(r3, 1.0, sites).mat() - r3.mat()).norm() < 1e-13);
    CHECK((apply_local_depolarizing(r3, 0.0, sites).mat() - identity(8) / 8.0).norm() < 1e-13);

    // locality: product states stay products of the one-site map
    auto a = testsupport::random_mixed_state(2, rng);
    auto b = testsupport::random_mixed_state(2, rng);
    const double lam = 0.4;
    auto joint = apply_local_depolarizing(DensityMatrix(kron(a.mat(), b.mat())), lam, {2, 2});
    auto la = apply_depolarizing(a, lam);
    auto lb = apply_depolarizing(b, lam);
    CHECK((joint.mat() - kron(la.mat(), lb.mat())).norm() < 1e-12);

    CHECK_THROWS_AS(apply_local_depolarizing(r3, 0.5, {2, 4}), InvalidInput);
}

TEST_CASE("effective_generators") {
    auto gens = qubit_yz();

    auto at_zero = effective_generators(gens, theta2(0, 0));
    CHECK((at_zero[0].mat() - pauli_y()).norm() < 1e-14);
    CHECK((at_zero[1].mat() - pauli_z()).norm() < 1e-14);

    // single commuting generator: effective generator unchanged at any theta
    std::vector<HermitianMatrix> single;
    single.emplace_back(pauli_z());
    GeneratorSet gz(std::move(single));
    RealVector t1(1);
    t1 << 0.83;
    auto eff = effective_generators(gz, t1);
    CHECK((eff[0].mat() - pauli_z()).norm() < 1e-13);

    // qubit pair at theta = (pi/4, 0): frozen from the finite-difference oracle
    auto at_quarter = effective_generators(gens, theta2(M_PI / 4, 0));
    ComplexMatrix expected = (2.0 / M_PI) * (pauli_z() + pauli_x());
    CHECK((at_quarter[1].mat() - expected).norm() < 1e-12);

    // dU/dtheta_j = U * (i H_j^eff) against central differences, random models
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 6; ++rep) {
        const Eigen::Index dim = 2 + rep % 3;
        auto g = testsupport::random_generators(dim, 2, rng);
        RealVector theta = testsupport::random_theta(2, rng);
        auto heff = effective_generators(g, theta);
        ComplexMatrix u = build_unitary(g, theta);
        const double h = 1e-5;
        for (int j = 0; j < 2; ++j) {
            RealVector tp = theta, tm = theta;
            tp[j] += h;
            tm[j] -= h;
            ComplexMatrix du = (build_unitary(g, tp) - build_unitary(g, tm)) / (2.0 * h);
            CHECK((du - u * (Complex(0, 1) * heff[j].mat())).norm() < 1e-6);
        }
    }
}

TEST_CASE("encode") {
    auto gens = qubit_yz();
    ComplexVector e0(2);
    e0 << 1, 0;

    SUBCASE("noiseless pure at theta = 0") {
        StatisticalModel m(DensityMatrix::pure(e0), gens, NoiseSpec::none(), theta2(0, 0));
        auto enc = encode(m);
        CHECK((enc.rho_theta.mat() - m.probe.mat()).norm() < 1e-14);
        for (int j = 0; j < 2; ++j) {
            ComplexMatrix comm = gens[j].mat() * m.probe.mat() - m.probe.mat() * gens[j].mat();
            CHECK((enc.drho[j].mat() - Complex(0, 1) * comm).norm() < 1e-13);
            CHECK(std::abs(enc.drho[j].mat().trace()) < 1e-12);
        }
    }

    SUBCASE("commuting generator gives a null derivative") {
        std::vector<HermitianMatrix> single;
        single.emplace_back(pauli_z());
        RealVector t1(1);
        t1 << 0.4;
        StatisticalModel m(DensityMatrix::pure(e0), GeneratorSet(std::move(single)),
                           NoiseSpec::none(), t1);
        auto enc = encode(m);
        CHECK(enc.drho[0].mat().norm() < 1e-13);
    }

    SUBCASE("analytic derivatives match finite differences") {
        std::mt19937_64 rng(17);
        for (int rep = 0; rep < 8; ++rep) {
            const Eigen::Index dim = 2 + rep % 3;
            const int d = 2 + rep % 2;
            NoiseSpec noise =
                rep % 2 == 0 ? NoiseSpec::global_depolarizing(0.65) : NoiseSpec::none();
            StatisticalModel m(testsupport::random_mixed_state(dim, rng),
                               testsupport::random_generators(dim, d, rng), noise,
                               testsupport::random_theta(d, rng));
            auto enc = encode(m);
            for (int j = 0; j < d; ++j) {
                ComplexMatrix fd = testsupport::finite_difference_drho(m, j);
                CHECK((enc.drho[j].mat() - fd).norm() < 1e-8);
            }
        }
    }

    SUBCASE("local noise, three qubits, derivatives and lift consistency") {
        std::mt19937_64 rng(19);
        auto local = qubit_yz();
        auto lifted = lift_local_generators(local, 3);
        StatisticalModel m(testsupport::random_mixed_state(8, rng), lifted,
                           NoiseSpec::local_depolarizing(0.55, {2, 2, 2}), theta2(0.21, -0.33));
        auto enc = encode(m);
        for (int j = 0; j < 2; ++j) {
            ComplexMatrix fd = testsupport::finite_difference_drho(m, j);
            CHECK((enc.drho[j].mat() - fd).norm() < 1e-8);
        }
        // the lifted encoding equals the tensor product of one-site unitaries
        ComplexMatrix u_site = build_unitary(local, m.theta);
        ComplexMatrix u_explicit = kron(kron(u_site, u_site), u_site);
        CHECK((build_unitary(lifted, m.theta) - u_explicit).norm() < 1e-10);
        // and noise before/after the unitary agree (covariance)
        auto noised_first = apply_local_depolarizing(m.probe, m.noise.lambda, m.noise.site_dims);
        ComplexMatrix after = u_explicit * noised_first.mat() * u_explicit.adjoint();
        CHECK((enc.rho_theta.mat() - after).norm() < 1e-12);
    }
}

TEST_CASE("covariance and purity invariants") {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::Index dim = 2 + rep % 3;
        auto probe = testsupport::random_mixed_state(dim, rng);
        auto gens = testsupport::random_generators(dim, 2, rng);
        RealVector theta = testsupport::random_theta(2, rng);
        const double lam = 0.5;

        ComplexMatrix u = build_unitary(gens, theta);
        ComplexMatrix noise_then_unitary =
            u * apply_depolarizing(probe, lam).mat() * u.adjoint();
        auto unitary_then_noise =
            apply_depolarizing(DensityMatrix(ComplexMatrix(u * probe.mat() * u.adjoint())), lam);
        CHECK((noise_then_unitary - unitary_then_noise.mat()).norm() < 1e-12);

        // purity of the encoded state does not depend on theta
        StatisticalModel m1(probe, gens, NoiseSpec::global_depolarizing(lam), theta);
        StatisticalModel m2(probe, gens, NoiseSpec::global_depolarizing(lam),
                            testsupport::random_theta(2, rng));
        CHECK(encode(m1).rho_theta.purity() ==
              doctest::Approx(encode(m2).rho_theta.purity()).epsilon(1e-10));
    }
}

TEST_CASE("lift_local_generators") {
    auto gens = qubit_yz();
    auto same = lift_local_generators(gens, 1);
    CHECK((same[0].mat() - pauli_y()).norm() < 1e-15);

    auto two = lift_local_generators(gens, 2);
    ComplexMatrix zz = kron(pauli_z(), identity(2)) + kron(identity(2), pauli_z());
    CHECK((two[1].mat() - zz).norm() < 1e-15);
    RealVector diag_expected(4);
    diag_expected << 2, 0, 0, -2;
    for (int i = 0; i < 4; ++i)
        CHECK(two[1].mat()(i, i).real() == doctest::Approx(diag_expected[i]));

    CHECK_THROWS_AS(lift_local_generators(gens, 0), InvalidInput);
}

TEST_CASE("orthonormalize_generators_qubit") {
    auto gens = qubit_yz();

    SUBCASE("already orthogonal at theta = 0") {
        auto out = orthonormalize_generators_qubit(gens, theta2(0, 0));
        // unchanged up to the normalization Tr[H^2] = 2, diagonal Jacobian
        CHECK((out.generators[0].mat() - 0.5 * pauli_y()).norm() < 1e-13);
        CHECK((out.generators[1].mat() - 0.5 * pauli_z()).norm() < 1e-13);
        CHECK(out.jacobian(0, 1) == doctest::Approx(0.0));
        CHECK(out.jacobian(1, 0) == doctest::Approx(0.0));
        CHECK(out.jacobian(0, 0) == doctest::Approx(2.0));
    }

    SUBCASE("degenerate pair rejected") {
        std::vector<HermitianMatrix> dup;
        dup.emplace_back(pauli_y());
        dup.emplace_back(pauli_y());
        CHECK_THROWS_AS(
            orthonormalize_generators_qubit(GeneratorSet(std::move(dup)), theta2(0.1, 0.2)),
            DegenerateModel);
    }

    SUBCASE("anticommutation and encoding consistency at theta != 0") {
        for (auto theta : {theta2(M_PI / 4, 0), theta2(0.37, -0.82), theta2(-1.1, 0.44)}) {
            auto out = orthonormalize_generators_qubit(gens, theta);
            ComplexMatrix anti = out.generators[0].mat() * out.generators[1].mat() +
                                 out.generators[1].mat() * out.generators[0].mat();
            CHECK(anti.norm() < 1e-10);

            // delta-theta . H^eff = delta-theta' . H~ for random displacements
            auto heff = effective_generators(gens, theta);
            std::mt19937_64 rng(29);
            RealVector dt = testsupport::random_theta(2, rng);
            Eigen::Vector2d dtp = out.jacobian * Eigen::Vector2d(dt[0], dt[1]);
            ComplexMatrix lhs = dt[0] * heff[0].mat() + dt[1] * heff[1].mat();
            ComplexMatrix rhs = dtp[0] * out.generators[0].mat() + dtp[1] * out.generators[1].mat();
            CHECK((lhs - rhs).norm() < 1e-12);
        }
    }
}
