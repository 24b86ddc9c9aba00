#include <doctest.h>

#include <cmath>
#include <vector>

#include "lacc/complexmat.hpp"
#include "lacc/densmat.hpp"
#include "lacc/haar.hpp"
#include "lacc/rng.hpp"
#include "test_support.hpp"

using lacc::ComplexMatrix;
using lacc::PureState;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto [x, w] = lacc::gauss_legendre(5);
    REQUIRE(x.size() == 5);
    double sum = 0.0, quartic = 0.0, odd = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        sum += w[i];
        quartic += w[i] * std::pow(x[i], 4);
        odd += w[i] * std::pow(x[i], 7);
    }
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(quartic == doctest::Approx(2.0 / 5.0).epsilon(1e-13));
    CHECK(std::abs(odd) < 1e-14);  // odd powers vanish on symmetric nodes
    // order-5 rule is exact through degree 9
    double deg8 = 0.0;
    for (std::size_t i = 0; i < 5; ++i) deg8 += w[i] * std::pow(x[i], 8);
    CHECK(deg8 == doctest::Approx(2.0 / 9.0).epsilon(1e-12));

    check_error_kind("ValidationError", [] { (void)lacc::gauss_legendre(0); });
}

TEST_CASE("bloch grid weights sum to one and average projectors to I/2") {
    const lacc::QuadratureGrid g = lacc::bloch_grid(8, 8);
    REQUIRE(g.nodes.size() == 64);
    double sum = 0.0;
    ComplexMatrix avg(2, 2);
    for (const auto& n : g.nodes) {
        sum += n.weight;
        avg += n.weight * lacc::outer(n.state);
        CHECK(n.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    CHECK((avg - 0.5 * ComplexMatrix::identity(2)).max_abs() < 1e-13);
}

TEST_CASE("bloch grid reproduces the second haar moment") {
    // |<0|a>|^4 = cos^4(t/2) is quadratic in cos(t); exact already at 2x4
    const lacc::QuadratureGrid g = lacc::bloch_grid(2, 4);
    double m2 = 0.0;
    for (const auto& n : g.nodes) {
        const double p = std::norm(n.state.amp[0]);
        m2 += n.weight * p * p;
    }
    CHECK(m2 == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

    check_error_kind("ValidationError", [] { (void)lacc::bloch_grid(1, 4); });
    check_error_kind("ValidationError", [] { (void)lacc::bloch_grid(4, 1); });
}

TEST_CASE("haar pure states are normalized with uniform component weights") {
    lacc::Rng rng(201);
    double mean0 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const PureState s = lacc::sample_pure_state(3, rng);
        CHECK(std::abs(s.norm() - 1.0) < 1e-12);
        mean0 += std::norm(s.amp[0]);
    }
    mean0 /= n;
    CHECK(std::abs(mean0 - 1.0 / 3.0) < 0.01);

    check_error_kind("DimensionMismatch", [&] { (void)lacc::sample_pure_state(0, rng); });
}

TEST_CASE("haar unitaries are unitary and seed-deterministic") {
    lacc::Rng rng(203);
    const ComplexMatrix u = lacc::sample_haar_unitary(4, rng);
    CHECK((u.dagger() * u - ComplexMatrix::identity(4)).max_abs() < 1e-12);
    CHECK((u * u.dagger() - ComplexMatrix::identity(4)).max_abs() < 1e-12);

    lacc::Rng r1(7), r2(7);
    const ComplexMatrix a = lacc::sample_haar_unitary(3, r1);
    const ComplexMatrix b = lacc::sample_haar_unitary(3, r2);
    CHECK((a - b).max_abs() == 0.0);
}

TEST_CASE("rng split streams are independent of consumption and of each other") {
    lacc::Rng root(5);
    (void)root.uniform();
    (void)root.uniform();
    lacc::Rng fresh(5);
    // split depends only on the constructor seed, not on draws already made
    CHECK(root.split(3).uniform() == fresh.split(3).uniform());
    CHECK(lacc::Rng(5).split(1).uniform() != lacc::Rng(5).split(2).uniform());
    CHECK(lacc::Rng(5).uniform() != lacc::Rng(6).uniform());
}

TEST_CASE("local product bases are complete and orthonormal") {
    lacc::Rng rng(207);
    const std::vector<PureState> basis = lacc::sample_local_product_basis({2, 3}, rng);
    REQUIRE(basis.size() == 6);
    ComplexMatrix sum(6, 6);
    for (const auto& b : basis) sum += lacc::outer(b);
    CHECK((sum - ComplexMatrix::identity(6)).max_abs() < 1e-12);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            const double target = i == j ? 1.0 : 0.0;
            CHECK(std::abs(lacc::inner(basis[i], basis[j])) ==
                  doctest::Approx(target).epsilon(1e-10));
        }
}

TEST_CASE("product basis matches the kron of its factors") {
    lacc::Rng rng(211);
    const ComplexMatrix u = lacc::sample_haar_unitary(2, rng);
    const ComplexMatrix v = lacc::sample_haar_unitary(3, rng);
    const std::vector<PureState> basis = lacc::product_basis_from(u, v);
    REQUIRE(basis.size() == 6);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const PureState& b = basis[i * 3 + j];
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t s = 0; s < 3; ++s)
                    CHECK(std::abs(b.amp[r * 3 + s] - u(r, i) * v(s, j)) < 1e-14);
        }
}

TEST_CASE("basis_from_unitary returns the columns") {
    lacc::Rng rng(213);
    const ComplexMatrix u = lacc::sample_haar_unitary(4, rng);
    const std::vector<PureState> basis = lacc::basis_from_unitary(u);
    REQUIRE(basis.size() == 4);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t i = 0; i < 4; ++i) CHECK(basis[j].amp[i] == u(i, j));
}

TEST_CASE("random density matrices validate and are strictly mixed") {
    lacc::Rng rng(217);
    for (int trial = 0; trial < 5; ++trial) {
        const lacc::DensityMatrix rho = lacc::sample_density_matrix({2, 2}, rng);
        CHECK(rho.dim() == 4);
        CHECK(rho.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rho.purity() < 1.0);
        for (double ev : rho.eigenvalues()) CHECK(ev > -1e-12);
    }
}
