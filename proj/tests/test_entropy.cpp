#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lacc/densmat.hpp"
#include "lacc/ensembles.hpp"
#include "lacc/entropy.hpp"
#include "lacc/haar.hpp"
#include "lacc/rng.hpp"
#include "test_support.hpp"

using lacc::DensityMatrix;
using lacc::PureState;

namespace {

std::vector<double> random_spectrum(std::size_t d, lacc::Rng& rng) {
    std::vector<double> p(d);
    double sum = 0.0;
    for (double& v : p) {
        v = 0.05 + rng.uniform();
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

double min_gap(const std::vector<double>& p) {
    double g = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            g = std::min(g, std::abs(p[i] - p[j]));
    return g;
}

}

TEST_CASE("shannon entropy basics") {
    CHECK(lacc::shannon_entropy({1.0}) == 0.0);
    CHECK(lacc::shannon_entropy({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lacc::shannon_entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(lacc::shannon_entropy({0.7, 0.1, 0.1, 0.1}) ==
          doctest::Approx(1.356779649447039473).epsilon(1e-14));
    // permutation invariance
    CHECK(lacc::shannon_entropy({0.1, 0.2, 0.7}) ==
          doctest::Approx(lacc::shannon_entropy({0.7, 0.1, 0.2})).epsilon(1e-15));

    check_error_kind("NegativeProbability", [] { (void)lacc::shannon_entropy({-0.1, 1.1}); });
    check_error_kind("ValidationError", [] { (void)lacc::shannon_entropy({0.5, 0.4}); });
}

TEST_CASE("binary entropy endpoints and midpoint") {
    CHECK(lacc::binary_entropy(0.0) == 0.0);
    CHECK(lacc::binary_entropy(1.0) == 0.0);
    CHECK(lacc::binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    const double c = std::cos(std::acos(-1.0) / 8.0);
    CHECK(lacc::binary_entropy(c * c) == doctest::Approx(0.600876036692856101).epsilon(1e-12));
}

TEST_CASE("von Neumann entropy of pure, mixed, and diagonal states") {
    const DensityMatrix pure = DensityMatrix::from_pure(PureState{{1, 0}, {0, 0}}, {2});
    CHECK(lacc::von_neumann_entropy(pure) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(lacc::von_neumann_entropy(DensityMatrix::maximally_mixed({2, 2})) ==
          doctest::Approx(2.0).epsilon(1e-12));

    lacc::ComplexMatrix m(2, 2);
    m(0, 0) = 0.7;
    m(1, 1) = 0.3;
    CHECK(lacc::von_neumann_entropy(DensityMatrix(m, {2})) ==
          doctest::Approx(lacc::binary_entropy(0.7)).epsilon(1e-12));
}

TEST_CASE("subentropy reference values") {
    CHECK(lacc::subentropy({0.5, 0.5}) == doctest::Approx(0.278652479555518296).epsilon(1e-12));
    CHECK(lacc::subentropy({2.0 / 3.0, 1.0 / 3.0}) ==
          doctest::Approx(0.251629167387822848).epsilon(1e-12));
    CHECK(lacc::subentropy({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}) ==
          doctest::Approx(0.382716633313686675).epsilon(1e-11));
    CHECK(lacc::subentropy({0.25, 0.25, 0.25, 0.25}) ==
          doctest::Approx(0.437080372370).epsilon(1e-10));
    CHECK(lacc::subentropy({1.0}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("subentropy ignores appended zero eigenvalues") {
    lacc::Rng rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> p = random_spectrum(2 + trial % 4, rng);
        const double base = lacc::subentropy(p);
        p.push_back(0.0);
        CHECK(std::abs(lacc::subentropy(p) - base) < 1e-9);
    }
}

TEST_CASE("subentropy never exceeds shannon entropy") {
    lacc::Rng rng(103);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> p = random_spectrum(2 + trial % 5, rng);
        CHECK(lacc::subentropy(p) <= lacc::shannon_entropy(p) + 1e-12);
        CHECK(lacc::subentropy(p) >= 0.0);
    }
}

TEST_CASE("subentropy is continuous across the degeneracy threshold") {
    const double base = lacc::subentropy({0.5, 0.5});
    for (double eps : {1e-10, 1e-8, 1e-7}) {
        CHECK(std::abs(lacc::subentropy({0.5 + eps, 0.5 - eps}) - base) < 1e-6);
    }
    // three-fold near-degeneracies, from just past the pair threshold up to
    // gaps wide enough for the divided differences to take over
    const double third = 1.0 / 3.0;
    const double q0 = lacc::subentropy({third, third, third});
    for (double eps : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5}) {
        CHECK(std::abs(lacc::subentropy({third + eps, third, third - eps}) - q0) < 40.0 * eps + 1e-7);
    }
}

TEST_CASE("divided-difference and partial-fraction subentropy agree on separated spectra") {
    lacc::Rng rng(107);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> p;
        do {
            p = random_spectrum(2 + trial % 5, rng);
        } while (min_gap(p) < 1e-3);
        worst = std::max(worst, std::abs(lacc::subentropy(p) - lacc::subentropy_direct(p)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("harmonic log constants") {
    CHECK(lacc::harmonic_log_constant(1) == 0.0);
    CHECK(lacc::harmonic_log_constant(2) == doctest::Approx(0.721347520444481704).epsilon(1e-14));
    CHECK(lacc::harmonic_log_constant(3) == doctest::Approx(1.202245867407469506).epsilon(1e-14));
}

TEST_CASE("outcome table mutual information on a hand example") {
    lacc::OutcomeTable t;
    t.joint = {{0.25, 0.25}, {0.5, 0.0}};
    // I = H(X) + H(Y) - H(X,Y) = 1 + h(1/4) - 1.5
    CHECK(t.mutual_information() ==
          doctest::Approx(lacc::binary_entropy(0.25) - 0.5).epsilon(1e-12));

    lacc::OutcomeTable indep;
    indep.joint = {{0.25, 0.25}, {0.25, 0.25}};
    CHECK(indep.mutual_information() == doctest::Approx(0.0).epsilon(1e-12));

    lacc::OutcomeTable bad;
    bad.joint = {{0.5, 0.4}};
    check_error_kind("ValidationError", [&] { (void)bad.mutual_information(); });
    lacc::OutcomeTable neg;
    neg.joint = {{1.5, -0.5}};
    check_error_kind("NegativeProbability", [&] { (void)neg.mutual_information(); });
}

TEST_CASE("basis mutual information is invariant under relabeling and phases") {
    const lacc::Ensemble e = lacc::bell3_ensemble();
    lacc::Rng rng(109);
    std::vector<PureState> basis = lacc::sample_local_product_basis({2, 2}, rng);
    const double base = lacc::mutual_information_of_basis(e, basis);
    CHECK(base >= 0.0);

    std::vector<PureState> shuffled = {basis[2], basis[0], basis[3], basis[1]};
    CHECK(lacc::mutual_information_of_basis(e, shuffled) == doctest::Approx(base).epsilon(1e-12));

    std::vector<PureState> rephased = basis;
    for (auto& s : rephased)
        for (auto& a : s.amp) a *= lacc::cplx{0.6, 0.8};
    CHECK(lacc::mutual_information_of_basis(e, rephased) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("basis validation rejects incomplete or non-orthonormal sets") {
    const lacc::Ensemble e = lacc::bell3_ensemble();
    lacc::Rng rng(113);
    std::vector<PureState> basis = lacc::sample_local_product_basis({2, 2}, rng);

    std::vector<PureState> missing(basis.begin(), basis.begin() + 3);
    check_error_kind("IncompleteBasis", [&] { (void)lacc::mutual_information_of_basis(e, missing); });

    std::vector<PureState> repeated = basis;
    repeated[1] = repeated[0];
    check_error_kind("NonOrthonormal",
                     [&] { (void)lacc::mutual_information_of_basis(e, repeated); });
}

TEST_CASE("outcome table columns sum to the member probabilities") {
    const lacc::Ensemble e = lacc::bell3_ensemble();
    lacc::Rng rng(127);
    const std::vector<PureState> basis = lacc::sample_local_product_basis({2, 2}, rng);
    const lacc::OutcomeTable t = lacc::outcome_table(e, basis);
    REQUIRE(t.joint.size() == e.size());
    for (std::size_t x = 0; x < e.size(); ++x) {
        double row = 0.0;
        for (double v : t.joint[x]) row += v;
        CHECK(row == doctest::Approx(e.probs[x]).epsilon(1e-10));
    }
}
