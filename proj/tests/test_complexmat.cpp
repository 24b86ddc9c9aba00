#include <doctest.h>

#include <cmath>
#include <complex>

#include "lacc/complexmat.hpp"
#include "lacc/densmat.hpp"
#include "lacc/haar.hpp"
#include "lacc/rng.hpp"
#include "test_support.hpp"

using lacc::ComplexMatrix;
using lacc::cplx;
using lacc::PureState;

namespace {

ComplexMatrix random_hermitian(std::size_t n, lacc::Rng& rng) {
    ComplexMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
    ComplexMatrix h = g + g.dagger();
    h *= 0.5;
    return h;
}

}

TEST_CASE("matrix arithmetic and adjoint") {
    ComplexMatrix a(2, 3);
    a(0, 0) = {1, 2};
    a(1, 2) = {0, -3};
    const ComplexMatrix ad = a.dagger();
    CHECK(ad.rows() == 3);
    CHECK(ad.cols() == 2);
    CHECK(ad(0, 0) == cplx{1, -2});
    CHECK(ad(2, 1) == cplx{0, 3});

    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(i2.trace() == cplx{2, 0});
    CHECK((i2 * a - a).max_abs() == 0.0);

    ComplexMatrix b = a;
    b *= cplx{2, 0};
    CHECK((b - a - a).max_abs() == 0.0);
    CHECK(a.all_finite());
}

TEST_CASE("hermiticity error detects an asymmetric entry") {
    ComplexMatrix m = ComplexMatrix::identity(2);
    CHECK(m.hermiticity_error() == 0.0);
    m(0, 1) = {0.5, 0};
    CHECK(m.hermiticity_error() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("matmul dimension mismatch is rejected") {
    const ComplexMatrix a(2, 3);
    const ComplexMatrix b(2, 3);
    check_error_kind("DimensionMismatch", [&] { (void)(a * b); });
}

TEST_CASE("pure state norms and validation") {
    PureState s{{1.0, 0.0}, {0.0, 1.0}};
    CHECK(s.norm() == doctest::Approx(std::sqrt(2.0)));
    const PureState n = s.normalized();
    CHECK(n.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_NOTHROW(lacc::validate_pure_state(n));
    check_error_kind("ValidationError", [&] { lacc::validate_pure_state(s); });
}

TEST_CASE("inner, outer, apply, expectation agree on a hand example") {
    const PureState zero{{1, 0}, {0, 0}};
    const PureState plus{{1.0 / std::sqrt(2.0), 0}, {1.0 / std::sqrt(2.0), 0}};
    CHECK(std::abs(lacc::inner(zero, plus) - cplx{1.0 / std::sqrt(2.0), 0}) < 1e-15);

    const ComplexMatrix p = lacc::outer(plus);
    CHECK(p(0, 0).real() == doctest::Approx(0.5));
    CHECK(p(0, 1).real() == doctest::Approx(0.5));
    CHECK(p.hermiticity_error() < 1e-15);

    const PureState out = lacc::apply(p, zero);
    CHECK(std::abs(out.amp[0] - cplx{0.5, 0}) < 1e-15);
    CHECK(lacc::expectation_value(p, zero) == doctest::Approx(0.5).epsilon(1e-14));

    check_error_kind("DimensionMismatch", [&] { (void)lacc::inner(zero, PureState{{1, 0}}); });
}

TEST_CASE("kron layout places blocks row-major") {
    ComplexMatrix a(2, 2);
    a(0, 0) = 1;
    a(1, 1) = 2;
    ComplexMatrix b(2, 2);
    b(0, 1) = 3;
    const ComplexMatrix k = lacc::kron(a, b);
    CHECK(k.rows() == 4);
    CHECK(k(0, 1) == cplx{3, 0});
    CHECK(k(2, 3) == cplx{6, 0});
    CHECK(k.max_abs() == 6.0);

    const PureState ks = lacc::kron(PureState{{0, 0}, {1, 0}}, PureState{{1, 0}, {0, 0}});
    CHECK(ks.amp[2] == cplx{1, 0});  // |1> x |0> -> index 2
    CHECK(ks.norm() == doctest::Approx(1.0));
}

TEST_CASE("eigendecomposition reconstructs random hermitian matrices") {
    lacc::Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 4);
        const ComplexMatrix h = random_hermitian(n, rng);
        const lacc::EighResult r = lacc::jacobi_eigh(h);

        ComplexMatrix rebuilt(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    rebuilt(i, j) += r.eigenvalues[k] * r.eigenvectors(i, k) *
                                     std::conj(r.eigenvectors(j, k));
        CHECK((rebuilt - h).max_abs() < 1e-10);

        const ComplexMatrix gram = r.eigenvectors.dagger() * r.eigenvectors;
        CHECK((gram - ComplexMatrix::identity(n)).max_abs() < 1e-10);
        for (std::size_t k = 1; k < n; ++k) CHECK(r.eigenvalues[k - 1] >= r.eigenvalues[k]);
    }
}

TEST_CASE("eigenvalues of a degenerate diagonal spectrum") {
    ComplexMatrix m(4, 4);
    m(0, 0) = m(1, 1) = m(2, 2) = 1.0 / 3.0;
    const std::vector<double> ev = lacc::jacobi_eigenvalues(m);
    CHECK(ev[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(ev[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(ev[3]) < 1e-14);
}

TEST_CASE("equal mixture of |00> and |++> has eigenvalues 3/4 and 1/4") {
    const PureState zz{{1, 0}, {0, 0}, {0, 0}, {0, 0}};
    const double h = 0.5;
    const PureState pp{{h, 0}, {h, 0}, {h, 0}, {h, 0}};
    ComplexMatrix m = lacc::outer(zz) + lacc::outer(pp);
    m *= 0.5;
    const std::vector<double> ev = lacc::jacobi_eigenvalues(m);
    CHECK(ev[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(ev[2]) < 1e-12);
    CHECK(std::abs(ev[3]) < 1e-12);
}

TEST_CASE("equal mixture of |0> and |+> has eigenvalues cos^2 pi/8, sin^2 pi/8") {
    const PureState zero{{1, 0}, {0, 0}};
    const double r = 1.0 / std::sqrt(2.0);
    const PureState plus{{r, 0}, {r, 0}};
    ComplexMatrix m = lacc::outer(zero) + lacc::outer(plus);
    m *= 0.5;
    const std::vector<double> ev = lacc::jacobi_eigenvalues(m);
    const double c = std::cos(std::acos(-1.0) / 8.0);
    CHECK(ev[0] == doctest::Approx(c * c).epsilon(1e-12));
    CHECK(ev[1] == doctest::Approx(1.0 - c * c).epsilon(1e-12));
}

TEST_CASE("eigh rejects a non-square matrix") {
    check_error_kind("DimensionMismatch", [] { (void)lacc::jacobi_eigh(ComplexMatrix(2, 3)); });
}
