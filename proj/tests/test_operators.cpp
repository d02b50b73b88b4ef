#include "oracles.hpp"
#include "support.hpp"

#include "qfidyn/errors.hpp"
#include "qfidyn/operators.hpp"

#include <doctest.h>

#include <random>

using namespace qfidyn;
using support::herm;

namespace {

Matrix pauli(Axis a) {
    switch (a) {
    case Axis::X: return oracle::sx();
    case Axis::Y: return oracle::sy();
    case Axis::Z: return oracle::sz();
    default: return oracle::id2();
    }
}

}  // namespace

TEST_CASE("pauli_site single-site matrices") {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;
    CHECK(pauli_site(Axis::Z, 0, 1).matrix().isApprox(z));

    Matrix plus(2, 2);
    plus << 0, 1, 0, 0;
    CHECK(pauli_site(Axis::Plus, 0, 1).matrix().isApprox(plus));
    CHECK(pauli_site(Axis::Minus, 0, 1).matrix().isApprox(plus.adjoint()));

    // <uu| s2^x |ud> = 1 (site 1 is the second, least significant qubit)
    CHECK(pauli_site(Axis::X, 1, 2)(0, 1) == Complex(1.0, 0.0));
    CHECK(pauli_site(Axis::X, 1, 2)(0, 2) == Complex(0.0, 0.0));
}

TEST_CASE("pauli_site range errors") {
    CHECK_THROWS_AS(pauli_site(Axis::X, 2, 2), DomainError);
    CHECK_THROWS_AS(pauli_site(Axis::X, -1, 2), DomainError);
}

TEST_CASE("axis parsing") {
    CHECK(parse_axis("x") == Axis::X);
    CHECK(parse_axis("Z") == Axis::Z);
    CHECK(parse_axis("+") == Axis::Plus);
    CHECK(parse_axis("minus") == Axis::Minus);
    CHECK(parse_axis("i") == Axis::I);
    CHECK_THROWS_AS(parse_axis("w"), DomainError);
}

TEST_CASE("Pauli algebra on random sites") {
    std::mt19937 rng(7);
    const Axis axes[] = {Axis::X, Axis::Y, Axis::Z};
    for (int n = 1; n <= 4; ++n) {
        const int site = std::uniform_int_distribution<int>(0, n - 1)(rng);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                const Operator sa = pauli_site(axes[a], site, n);
                const Operator sb = pauli_site(axes[b], site, n);
                Matrix expected = Matrix::Zero(sa.dim(), sa.dim());
                if (a != b) {
                    const int c = 3 - a - b;
                    const double eps = ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
                    expected = Complex(0.0, 2.0 * eps) * pauli_site(axes[c], site, n).matrix();
                }
                CHECK((commutator(sa, sb).matrix() - expected).norm() < 1e-13);
            }
            if (n > 1) {
                const int other = (site + 1) % n;
                CHECK(commutator(pauli_site(axes[a], site, n), pauli_site(axes[(a + 1) % 3], other, n))
                          .hs_norm() < 1e-14);
            }
        }
    }
}

TEST_CASE("commutator examples") {
    const Operator x = pauli_site(Axis::X, 0, 1), y = pauli_site(Axis::Y, 0, 1);
    CHECK((commutator(x, y).matrix() - Complex(0, 2) * pauli_site(Axis::Z, 0, 1).matrix()).norm() < 1e-15);
    const HermitianOperator h = build_xx_hamiltonian({2, 1.0, 0.3});
    CHECK(commutator(h, h).hs_norm() == 0.0);
    CHECK_THROWS_AS(commutator(x, pauli_site(Axis::X, 0, 2)), DomainError);
}

TEST_CASE("two-site XX Hamiltonian matches the hand-built matrix") {
    for (double h : {0.0, 0.5, 1.5}) {
        const HermitianOperator H = build_xx_hamiltonian({2, 1.0, h});
        CHECK((H.matrix() - oracle::xx_two_site(h)).norm() < 1e-14);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(build_xx_hamiltonian({2, 1.0, 0.5}).matrix());
    const Eigen::Vector4d expected(-2, -1, 1, 2);
    CHECK((es.eigenvalues() - expected).norm() < 1e-12);
    CHECK(std::abs(build_xx_hamiltonian({2, 1.0, 0.0}).matrix().trace()) < 1e-14);
}

TEST_CASE("XX chain conserves total magnetization") {
    const HermitianOperator h = build_xx_hamiltonian({7, 1.0, 0.0});
    CHECK(h.dim() == 128);
    CHECK(h.is_hermitian());
    const HermitianOperator mz = local_generator(GeneratorKind::UniformZ, 7);
    CHECK(commutator(h, mz).hs_norm() < 1e-12);
    const HermitianOperator hp = build_xx_hamiltonian({5, 0.7, 1.3, Boundary::Periodic});
    CHECK(commutator(hp, local_generator(GeneratorKind::UniformZ, 5)).hs_norm() < 1e-12);
}

TEST_CASE("periodic chain adds the wrap-around bond") {
    const Matrix open = build_xx_hamiltonian({3, 1.0, 0.0, Boundary::Open}).matrix();
    const Matrix periodic = build_xx_hamiltonian({3, 1.0, 0.0, Boundary::Periodic}).matrix();
    const Matrix bond = (pauli_site(Axis::X, 2, 3) * pauli_site(Axis::X, 0, 3) +
                         pauli_site(Axis::Y, 2, 3) * pauli_site(Axis::Y, 0, 3)).matrix();
    CHECK((periodic - open - bond).norm() < 1e-14);
    // N = 2: the bond is not doubled
    CHECK((build_xx_hamiltonian({2, 1.0, 0.2, Boundary::Periodic}).matrix() -
           build_xx_hamiltonian({2, 1.0, 0.2, Boundary::Open}).matrix()).norm() < 1e-14);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(validate(SpinChainSpec{1}), DomainError);
    CHECK_THROWS_AS(validate(SpinChainSpec{13}), DomainError);
    SpinChainSpec big{13};
    big.max_sites = 13;
    CHECK_NOTHROW(validate(big));
}

TEST_CASE("local generators") {
    const HermitianOperator anti = local_generator(GeneratorKind::AntisymmetricX, 2);
    const Matrix expected = 0.5 * (oracle::kron(oracle::sx(), oracle::id2()) - oracle::kron(oracle::id2(), oracle::sx()));
    CHECK((anti.matrix() - expected).norm() < 1e-15);
    Eigen::SelfAdjointEigenSolver<Matrix> es(anti.matrix());
    CHECK((es.eigenvalues() - Eigen::Vector4d(-1, 0, 0, 1)).norm() < 1e-12);

    CHECK((local_generator(GeneratorKind::StaggeredX, 2).matrix() - anti.matrix()).norm() < 1e-15);
    CHECK_THROWS_AS(local_generator(GeneratorKind::AntisymmetricX, 3), DomainError);

    for (auto kind : {GeneratorKind::StaggeredX, GeneratorKind::UniformX, GeneratorKind::UniformZ}) {
        for (const auto& term : local_generator_terms(kind, 4)) {
            Eigen::SelfAdjointEigenSolver<Matrix> t(term.matrix());
            CHECK(t.eigenvalues().maxCoeff() - t.eigenvalues().minCoeff() == doctest::Approx(1.0));
            CHECK(operator_support(term, 4).size() == 1);
        }
    }
    CHECK(parse_generator_kind("staggered-x") == GeneratorKind::StaggeredX);
    CHECK_THROWS_AS(parse_generator_kind("diagonal"), DomainError);
}

TEST_CASE("Pauli strings") {
    PauliString ps{Complex(0.5, 0.0), {{0, Axis::X}, {2, Axis::Z}}};
    const Matrix expected =
        0.5 * oracle::kron(oracle::kron(oracle::sx(), oracle::id2()), oracle::sz());
    CHECK((to_operator(ps, 3).matrix() - expected).norm() < 1e-15);

    PauliString repeated{Complex(1.0, 0.0), {{1, Axis::X}, {1, Axis::Y}}};
    CHECK_THROWS_AS(to_operator(repeated, 2), DomainError);
    PauliString outside{Complex(1.0, 0.0), {{3, Axis::X}}};
    CHECK_THROWS_AS(to_operator(outside, 3), DomainError);

    std::mt19937 rng(3);
    const Axis all[] = {Axis::I, Axis::X, Axis::Y, Axis::Z};
    for (int trial = 0; trial < 20; ++trial) {
        PauliString r;
        Matrix dense = Matrix::Identity(1, 1);
        for (int s = 0; s < 3; ++s) {
            const Axis a = all[std::uniform_int_distribution<int>(0, 3)(rng)];
            r.factors.push_back({s, a});
            dense = oracle::kron(dense, pauli(a));
        }
        CHECK((to_operator(r, 3).matrix() - dense).norm() < 1e-14);
    }
}

TEST_CASE("Hermiticity certificate") {
    CHECK_THROWS_AS(HermitianOperator(pauli_site(Axis::Plus, 0, 2)), DomainError);
    const HermitianOperator a = local_generator(GeneratorKind::UniformX, 3);
    const HermitianOperator b = build_xx_hamiltonian({3, 1.0, 0.4});
    CHECK((2.5 * a + b - a).is_hermitian());
    CHECK(anticommutator(a, b).is_hermitian());
    CHECK_THROWS_AS(Operator(Matrix::Zero(2, 3)), DomainError);
}

TEST_CASE("operator support") {
    CHECK(operator_support(pauli_site(Axis::X, 3, 5), 5) == std::vector<int>{3});
    CHECK(operator_support(Operator::identity(8), 3).empty());
    const auto syms = two_qubit_dynamical_symmetries();
    CHECK(operator_support(syms[0].op, 2) == std::vector<int>{0, 1});

    // A x I has the support of A, shifted under relabeling I x A.
    std::mt19937 rng(5);
    const Matrix local = oracle::random_matrix(4, rng);
    CHECK(operator_support(embed(local, 0, 4), 4) == std::vector<int>{0, 1});
    CHECK(operator_support(embed(local, 2, 4), 4) == std::vector<int>{2, 3});
    CHECK(operator_support(embed(local, 1, 4), 4) == std::vector<int>{1, 2});
}

TEST_CASE("two-qubit eigenoperators") {
    for (double h : {0.3, 0.5, 1.5, 2.0}) {
        const HermitianOperator H = build_xx_hamiltonian({2, 1.0, h});
        const double omegas[] = {-2 * (1 + h), 2 * (1 + h), 2 * (1 - h), -2 * (1 - h)};
        const auto syms = two_qubit_dynamical_symmetries();
        REQUIRE(syms.size() == 4);
        for (std::size_t j = 0; j < 4; ++j) {
            const Operator c = commutator(H, syms[j].op);
            CHECK((c.matrix() - omegas[j] * syms[j].op.matrix()).norm() < 1e-12);
        }
    }
}

TEST_CASE("Hilbert-Schmidt inner product") {
    const Operator x = pauli_site(Axis::X, 0, 2);
    CHECK(hs_inner(x, x) == Complex(4.0, 0.0));
    CHECK(std::abs(hs_inner(x, pauli_site(Axis::Y, 0, 2))) < 1e-15);
    CHECK(sites_for_dim(16) == 4);
    CHECK_THROWS_AS(sites_for_dim(6), DomainError);
}
