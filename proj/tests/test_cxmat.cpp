#include <cmath>
#include <complex>

#include "doctest.h"
#include "hbdof/cxmat.hpp"
#include "test_util.hpp"

using namespace hbdof;
using hbdof::test::orthonormality_error;
using hbdof::test::reconstruction_error;
using hbdof::test::subspace_distance;

TEST_CASE("gaussian_matrix is deterministic per seed and rejects zero dims") {
    Rng a(1234), b(1234), c(1235);
    const ComplexMatrix m1 = gaussian_matrix(1, 1, a);
    const ComplexMatrix m2 = gaussian_matrix(1, 1, b);
    CHECK(m1(0, 0) == m2(0, 0));
    CHECK(gaussian_matrix(1, 1, c)(0, 0) != m1(0, 0));
    CHECK_THROWS_AS(gaussian_matrix(0, 3, a), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_matrix(3, 0, a), std::invalid_argument);
}

TEST_CASE("gaussian_matrix matches CN(0,1) moments over 1e5 draws") {
    Rng rng(20240915);
    const ComplexMatrix m = gaussian_matrix(100, 1000, rng);
    cxd mean{0.0, 0.0};
    double power = 0.0;
    for (const cxd& z : m.data()) {
        mean += z;
        power += std::norm(z);
    }
    const double count = 1e5;
    mean /= count;
    CHECK(std::abs(mean) < 0.02);
    const double variance = power / count - std::norm(mean);
    CHECK(variance == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mix64 separates streams and repeats") {
    CHECK(mix64(7, 0) == mix64(7, 0));
    CHECK(mix64(7, 0) != mix64(7, 1));
    CHECK(mix64(7, 0) != mix64(8, 0));
}

TEST_CASE("svd of identity and of a singular diagonal") {
    const SvdResult id = svd(ComplexMatrix::identity(3));
    REQUIRE(id.singular_values.size() == 3);
    for (double s : id.singular_values) CHECK(s == doctest::Approx(1.0).epsilon(1e-14));

    ComplexMatrix d(2, 2);
    d(0, 0) = 3.0;
    const SvdResult f = svd(d);
    CHECK(f.singular_values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(f.singular_values[1] == doctest::Approx(0.0));
    CHECK(orthonormality_error(f.u) < 1e-12);  // zero direction completed orthonormally
    CHECK(reconstruction_error(d, f) <= 1e-10 * 3.0);
}

TEST_CASE("svd reconstructs a random 4x6 matrix") {
    Rng rng(5);
    const ComplexMatrix a = gaussian_matrix(4, 6, rng);
    const SvdResult f = svd(a);
    CHECK(reconstruction_error(a, f) / a.frobenius_norm() < 1e-12);
    CHECK(orthonormality_error(f.u) < 1e-12);
    CHECK(orthonormality_error(f.v) < 1e-12);
    for (std::size_t i = 1; i < f.singular_values.size(); ++i) {
        CHECK(f.singular_values[i] <= f.singular_values[i - 1]);
    }
}

TEST_CASE("svd round-trip property over random shapes") {
    Rng rng(99);
    for (int cases = 0; cases < 100; ++cases) {
        const std::size_t rows = 1 + rng.next_u64() % 8;
        const std::size_t cols = 1 + rng.next_u64() % 8;
        const ComplexMatrix a = gaussian_matrix(rows, cols, rng);
        const SvdResult f = svd(a);
        CHECK(reconstruction_error(a, f) / a.frobenius_norm() < 1e-12);
        CHECK(orthonormality_error(f.u) < 1e-11);
        CHECK(orthonormality_error(f.v) < 1e-11);
    }
}

TEST_CASE("rank on zero, generic and constructed matrices") {
    CHECK(rank(ComplexMatrix(2, 2)) == 0);
    Rng rng(17);
    CHECK(rank(gaussian_matrix(2, 4, rng)) == 2);

    // outer product of two random vectors has rank one by construction
    const ComplexMatrix x = gaussian_matrix(3, 1, rng);
    const ComplexMatrix y = gaussian_matrix(3, 1, rng);
    CHECK(rank(x * y.adjoint()) == 1);

    CHECK_THROWS_AS(rank(x, 0.0), std::invalid_argument);
}

TEST_CASE("nullspace of a wide generic matrix") {
    Rng rng(31);
    const ComplexMatrix a = gaussian_matrix(2, 4, rng);
    const ComplexMatrix n = nullspace(a);
    REQUIRE(n.cols() == 2);
    CHECK(orthonormality_error(n) < 1e-10);
    CHECK((a * n).frobenius_norm() < 1e-9);
}

TEST_CASE("nullspace of identity is empty") {
    CHECK(nullspace(ComplexMatrix::identity(3)).cols() == 0);
}

TEST_CASE("row duplication preserves the kernel") {
    Rng rng(47);
    const ComplexMatrix h = gaussian_matrix(2, 4, rng);
    const ComplexMatrix n1 = nullspace(h);
    const ComplexMatrix n2 = nullspace(vcat(h, h));
    REQUIRE(n1.cols() == 2);
    REQUIRE(n2.cols() == 2);
    CHECK(subspace_distance(n1, n2) < 1e-9);
}

TEST_CASE("rank-nullity property") {
    Rng rng(53);
    for (int cases = 0; cases < 100; ++cases) {
        const std::size_t rows = 1 + rng.next_u64() % 6;
        const std::size_t cols = 1 + rng.next_u64() % 6;
        ComplexMatrix a = gaussian_matrix(rows, cols, rng);
        if (cases % 3 == 0 && rows > 1) {
            // force a rank drop by duplicating a row
            for (std::size_t c = 0; c < cols; ++c) a(rows - 1, c) = a(0, c);
        }
        CHECK(rank(a) + nullspace(a).cols() == cols);
    }
}

TEST_CASE("qr basics") {
    const QrResult id = qr(ComplexMatrix::identity(3));
    CHECK((id.q - ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);
    CHECK((id.r - ComplexMatrix::identity(3)).frobenius_norm() < 1e-14);

    Rng rng(61);
    const ComplexMatrix a = gaussian_matrix(5, 3, rng);
    const QrResult f = qr(a);
    CHECK(orthonormality_error(f.q) < 1e-12);
    CHECK((a - f.q * f.r).frobenius_norm() / a.frobenius_norm() < 1e-12);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(f.r(i, i).imag() == doctest::Approx(0.0));
        CHECK(f.r(i, i).real() >= 0.0);
        for (std::size_t j = 0; j < i; ++j) CHECK(std::abs(f.r(i, j)) == 0.0);
    }

    ComplexMatrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 3.0;
    const QrResult fd = qr(d);
    CHECK(std::abs(fd.r(0, 0) - cxd{2.0, 0.0}) < 1e-14);
    CHECK(std::abs(fd.r(1, 1) - cxd{3.0, 0.0}) < 1e-14);

    CHECK_THROWS_AS(qr(gaussian_matrix(2, 4, rng)), std::invalid_argument);
}

TEST_CASE("orthonormal_complement spans the rest of the space") {
    Rng rng(71);
    const ComplexMatrix q = qr(gaussian_matrix(6, 2, rng)).q;
    const ComplexMatrix c = orthonormal_complement(q);
    REQUIRE(c.cols() == 4);
    CHECK(orthonormality_error(c) < 1e-12);
    CHECK((q.adjoint() * c).frobenius_norm() < 1e-12);
    CHECK(orthonormal_complement(ComplexMatrix(4, 0)).cols() == 4);
}

TEST_CASE("logdet_hpd on known matrices") {
    CHECK(logdet_hpd(ComplexMatrix::identity(3)) == doctest::Approx(0.0));
    ComplexMatrix d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 2.0;
    CHECK(logdet_hpd(d) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("logdet_hpd matches an eigenvalue oracle on B^H B + I") {
    Rng rng(83);
    const ComplexMatrix b = gaussian_matrix(3, 3, rng);
    const ComplexMatrix a = b.adjoint() * b + ComplexMatrix::identity(3);
    // independent route: eigenvalues of B^H B + I are sigma_k(B)^2 + 1
    double expected = 0.0;
    for (double s : svd(b).singular_values) expected += std::log(s * s + 1.0);
    const double got = logdet_hpd(a);
    CHECK(std::abs(got - expected) / std::abs(expected) < 1e-10);
}

TEST_CASE("logdet_hpd rejects non-HPD inputs") {
    ComplexMatrix neg(2, 2);
    neg(0, 0) = 1.0;
    neg(1, 1) = -1.0;
    CHECK_THROWS_AS(logdet_hpd(neg), std::invalid_argument);

    ComplexMatrix asym(2, 2);
    asym(0, 0) = 1.0;
    asym(1, 1) = 1.0;
    asym(0, 1) = cxd{0.0, 1.0};
    asym(1, 0) = cxd{0.0, 1.0};  // Hermitian would need -i here
    CHECK_THROWS_AS(logdet_hpd(asym), std::invalid_argument);

    CHECK_THROWS_AS(logdet_hpd(ComplexMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("logdet_hpd is invariant under unitary conjugation") {
    Rng rng(97);
    for (int cases = 0; cases < 100; ++cases) {
        const std::size_t n = 1 + rng.next_u64() % 5;
        const ComplexMatrix b = gaussian_matrix(n, n, rng);
        const ComplexMatrix a = b.adjoint() * b + ComplexMatrix::identity(n);
        const ComplexMatrix u = qr(gaussian_matrix(n, n, rng)).q;
        const double direct = logdet_hpd(a);
        const double rotated = logdet_hpd(u * a * u.adjoint());
        CHECK(std::abs(direct - rotated) < 1e-9 * std::max(1.0, std::abs(direct)));
    }
}
