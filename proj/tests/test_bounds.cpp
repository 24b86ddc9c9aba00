#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lacc/bounds.hpp"
#include "lacc/complexmat.hpp"
#include "lacc/densmat.hpp"
#include "lacc/ensembles.hpp"
#include "lacc/entropy.hpp"
#include "lacc/haar.hpp"
#include "lacc/rng.hpp"
#include "test_support.hpp"

using lacc::BoundReport;
using lacc::ComplexMatrix;
using lacc::DensityMatrix;
using lacc::Ensemble;
using lacc::EvalParams;
using lacc::Method;
using lacc::PureState;

namespace {

constexpr double kLog2e = 1.4426950408889634;

Ensemble zero_plus_ensemble() {
    const double r = 1.0 / std::sqrt(2.0);
    Ensemble e;
    e.label = "zero-plus";
    e.dims = {2};
    e.probs = {0.5, 0.5};
    e.members = {DensityMatrix::from_pure(PureState{{1, 0}, {0, 0}}, {2}),
                 DensityMatrix::from_pure(PureState{{r, 0}, {r, 0}}, {2})};
    return e;
}

// two-member ensemble whose average is a product while the members are not
// balanced: the coarse 2x2 grid truncates the two routes differently
Ensemble skew_product_ensemble() {
    ComplexMatrix a(2, 2);
    a(0, 0) = 0.9;
    a(1, 1) = 0.1;
    ComplexMatrix b0(2, 2), b1(2, 2);
    b0(0, 0) = 1.0;
    b1(1, 1) = 1.0;
    Ensemble e;
    e.label = "skew";
    e.dims = {2, 2};
    e.probs = {0.5, 0.5};
    e.members = {DensityMatrix(lacc::kron(a, b0), {2, 2}),
                 DensityMatrix(lacc::kron(a, b1), {2, 2})};
    return e;
}

EvalParams quad_params() {
    EvalParams p;
    p.method = Method::quadrature;
    return p;
}

}

TEST_CASE("holevo bound on the classic qubit pair") {
    const BoundReport r = lacc::holevo_chi(zero_plus_ensemble());
    CHECK(r.name == "chi");
    CHECK(r.method == "exact");
    CHECK(r.std_error == 0.0);
    CHECK(r.value == doctest::Approx(0.600876036692856101).epsilon(1e-12));
}

TEST_CASE("holevo bound vanishes for identical members and is exact on orthogonal ones") {
    Ensemble same;
    same.dims = {2};
    same.probs = {0.5, 0.5};
    same.members = {DensityMatrix::maximally_mixed({2}), DensityMatrix::maximally_mixed({2})};
    CHECK(lacc::holevo_chi(same).value == doctest::Approx(0.0).epsilon(1e-12));

    const Ensemble bell = lacc::bell3_ensemble();
    CHECK(lacc::holevo_chi(bell).value == doctest::Approx(std::log2(3.0)).epsilon(1e-12));
}

TEST_CASE("subentropy gap lies below the holevo bound") {
    const Ensemble e = zero_plus_ensemble();
    const BoundReport gap = lacc::subentropy_gap(e);
    CHECK(gap.name == "lambda");
    const std::vector<double> ev = e.average_state().eigenvalues();
    CHECK(gap.value == doctest::Approx(lacc::subentropy(ev)).epsilon(1e-12));
    CHECK(gap.value <= lacc::holevo_chi(e).value + 1e-12);
}

TEST_CASE("local holevo bound on the reference ensembles") {
    CHECK(lacc::local_chi(lacc::bell3_ensemble()).value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lacc::local_chi(lacc::product8_ensemble()).value == doctest::Approx(2.0).epsilon(1e-9));

    const Ensemble e = lacc::bell3_ensemble();
    const double base = lacc::local_chi(e).value;
    CHECK(lacc::local_chi(e, 0.25).value == doctest::Approx(base - 0.25).epsilon(1e-12));
    check_error_kind("NegativeEoutTerm", [&] { (void)lacc::local_chi(e, -0.1); });
    check_error_kind("DimensionMismatch", [] { (void)lacc::local_chi(zero_plus_ensemble()); });
}

TEST_CASE("local subentropy of the maximally mixed two-qubit state is 2 bits") {
    const BoundReport r = lacc::local_subentropy(DensityMatrix::maximally_mixed({2, 2}), quad_params());
    CHECK(r.name == "Q_L");
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("local subentropy of a pure product state is log2 e") {
    const DensityMatrix rho =
        DensityMatrix::from_pure(PureState{{1, 0}, {0, 0}, {0, 0}, {0, 0}}, {2, 2});
    const BoundReport r = lacc::local_subentropy(rho, quad_params());
    CHECK(std::abs(r.value - kLog2e) < 5e-7);  // endpoint truncation of the 64-node grid
}

TEST_CASE("local subentropy is additive over full-rank products") {
    lacc::Rng rng(401);
    const DensityMatrix a = lacc::sample_density_matrix({2}, rng);
    const DensityMatrix b = lacc::sample_density_matrix({2}, rng);
    const DensityMatrix ab(lacc::kron(a.matrix(), b.matrix()), {2, 2});
    const double expected = lacc::subentropy(a.eigenvalues()) + lacc::subentropy(b.eigenvalues()) +
                            2.0 * lacc::harmonic_log_constant(2);
    const BoundReport r = lacc::local_subentropy(ab, quad_params());
    CHECK(std::abs(r.value - expected) < 1e-9);  // smooth integrand: spectral convergence
}

TEST_CASE("locally accessible lower bound matches the frozen references by quadrature") {
    const BoundReport bell = lacc::local_subentropy_gap(lacc::bell3_ensemble(), quad_params());
    CHECK(bell.name == "lambda_L");
    CHECK(bell.method == "quadrature");
    CHECK(bell.std_error == 0.0);
    // constant integrands: the grid is exact here
    CHECK(bell.value == doctest::Approx(0.251629167387822848).epsilon(1e-12));

    const BoundReport prod = lacc::local_subentropy_gap(lacc::product8_ensemble(), quad_params());
    CHECK(std::abs(prod.value - 0.557304959111036593) < 5e-7);

    const BoundReport e1 =
        lacc::local_subentropy_gap(lacc::e1_ensemble(0.0, std::acos(-1.0) / 4.0), quad_params());
    CHECK(std::abs(e1.value - 0.417978719333277444) < 1e-7);
}

TEST_CASE("monte carlo route reproduces the quadrature value within its own error bar") {
    EvalParams mc;
    mc.method = Method::monte_carlo;
    mc.seed = 77;
    const Ensemble e = lacc::bell3_ensemble();
    const BoundReport r = lacc::local_subentropy_gap(e, mc);
    CHECK(r.method == "monte_carlo");
    CHECK(r.std_error > 0.0);
    CHECK(std::abs(r.value - 0.251629167387822848) < 5.0 * r.std_error + 1e-9);
}

TEST_CASE("monte carlo estimates are identical across thread counts") {
    EvalParams p1;
    p1.method = Method::monte_carlo;
    p1.n_samples = 20000;
    p1.seed = 5;
    p1.threads = 1;
    EvalParams p7 = p1;
    p7.threads = 7;
    const Ensemble e = lacc::bell3_ensemble();
    const BoundReport a = lacc::local_subentropy_gap(e, p1);
    const BoundReport b = lacc::local_subentropy_gap(e, p7);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("quadrature refuses systems without a qubit first party") {
    lacc::Rng rng(403);
    const Ensemble e33 = lacc::random_ensemble({3, 3}, 2, rng);
    check_error_kind("QuadratureUnsupported",
                     [&] { (void)lacc::local_subentropy_gap(e33, quad_params()); });

    EvalParams mc;
    mc.method = Method::monte_carlo;
    mc.n_samples = 5000;
    const BoundReport r = lacc::local_subentropy_gap(e33, mc);
    const auto& f = r.flags;
    CHECK(std::find(f.begin(), f.end(), "separable-only") != f.end());

    const Ensemble e23 = lacc::random_ensemble({2, 3}, 2, rng);
    const BoundReport r23 = lacc::local_subentropy_gap(e23, mc);
    CHECK(r23.flags.empty());
}

TEST_CASE("monte carlo requires a workable sample budget") {
    EvalParams tiny;
    tiny.method = Method::monte_carlo;
    tiny.n_samples = 50;
    check_error_kind("SampleBudgetTooSmall",
                     [&] { (void)lacc::local_subentropy_gap(lacc::bell3_ensemble(), tiny); });
}

TEST_CASE("single-party input cannot use the quadrature route") {
    check_error_kind("QuadratureUnsupported",
                     [] { (void)lacc::local_subentropy_gap(zero_plus_ensemble(), quad_params()); });
}

TEST_CASE("product-form route agrees with the direct route when the average factorizes") {
    const Ensemble e = lacc::product8_ensemble();
    const BoundReport direct = lacc::local_subentropy_gap(e, quad_params());
    const BoundReport pf = lacc::local_subentropy_gap_product_form(e, quad_params());
    CHECK(std::abs(pf.value - direct.value) < 2e-6);
}

TEST_CASE("product-form route refuses a non-product average") {
    check_error_kind("AverageNotProduct", [] {
        (void)lacc::local_subentropy_gap_product_form(lacc::bell3_ensemble(), quad_params());
    });
}

TEST_CASE("cross-route consistency check trips on a deliberately coarse grid") {
    EvalParams coarse;
    coarse.method = Method::quadrature;
    coarse.n_theta = 2;
    coarse.n_phi = 2;
    check_error_kind("ConsistencyFailure", [&] {
        (void)lacc::local_subentropy_gap_product_form(skew_product_ensemble(), coarse);
    });
    // the same ensemble passes on the default grid
    CHECK_NOTHROW((void)lacc::local_subentropy_gap_product_form(skew_product_ensemble(), quad_params()));
}

TEST_CASE("single-copy distillation bound reduces to one minus the locally accessible bound") {
    const lacc::PureDecomposition d = lacc::bell_diagonal_decomposition(0.7, 0.1, 0.1, 0.1);
    const BoundReport r = lacc::distillation_bound(d, 1, lacc::default_isometry(2), quad_params());
    CHECK(r.name == "distill_D");
    const BoundReport lam = lacc::local_subentropy_gap(lacc::string_ensemble(d, 1), quad_params());
    CHECK(std::abs(r.value - (1.0 - lam.value)) < 1e-10);
    CHECK(r.value == doctest::Approx(0.8114052384459711).epsilon(1e-6));
}

TEST_CASE("distillation bound on a pure product decomposition is zero") {
    const BoundReport r = lacc::distillation_bound(lacc::pure_product_decomposition(), 1,
                                                   lacc::default_isometry(2), quad_params());
    CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("two-copy distillation bound evaluates on the projected string ensemble") {
    const lacc::PureDecomposition d = lacc::bell_diagonal_decomposition(0.7, 0.1, 0.1, 0.1);
    const BoundReport r = lacc::distillation_bound(d, 2, lacc::default_isometry(4), quad_params());
    CHECK(std::isfinite(r.value));
    CHECK(r.params.at("m").get<double>() == 2.0);
}

TEST_CASE("distillation rejects bad copy counts and bad compressions") {
    const lacc::PureDecomposition d = lacc::bell_diagonal_decomposition(0.7, 0.1, 0.1, 0.1);
    check_error_kind("ValidationError",
                     [&] { (void)lacc::distillation_bound(d, 0, lacc::default_isometry(2), quad_params()); });
    check_error_kind("NonIsometric",
                     [&] { (void)lacc::distillation_bound(d, 1, lacc::default_isometry(4), quad_params()); });
    ComplexMatrix skew(2, 2);
    skew(0, 0) = 1.0;
    skew(1, 0) = 1.0;
    check_error_kind("NonIsometric",
                     [&] { (void)lacc::distillation_bound(d, 1, skew, quad_params()); });
}

TEST_CASE("hashing yield comparison on bell-diagonal mixtures") {
    const lacc::HashingCheck flat = lacc::hashing_compatibility_check(
        lacc::bell_diagonal_decomposition(0.25, 0.25, 0.25, 0.25), quad_params());
    CHECK(flat.yield == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(flat.compatible);

    const lacc::HashingCheck skewed = lacc::hashing_compatibility_check(
        lacc::bell_diagonal_decomposition(0.7, 0.1, 0.1, 0.1), quad_params());
    CHECK(skewed.yield == doctest::Approx(1.0 - 1.356779649447039473).epsilon(1e-9));
    CHECK(skewed.bound == doctest::Approx(0.8114052384459711).epsilon(1e-6));
    CHECK(skewed.compatible);

    check_error_kind("NotBellDiagonal", [] {
        (void)lacc::hashing_compatibility_check(lacc::pure_product_decomposition(), quad_params());
    });
}

TEST_CASE("bound reports serialize all fields") {
    const BoundReport r = lacc::local_subentropy_gap(lacc::bell3_ensemble(), quad_params());
    const nlohmann::json j = r.to_json();
    CHECK(j.at("name") == "lambda_L");
    CHECK(j.at("value_bits").get<double>() == r.value);
    CHECK(j.at("std_error_bits").get<double>() == 0.0);
    CHECK(j.at("method") == "quadrature");
    CHECK(j.contains("params"));
    CHECK(j.at("flags").is_array());
}
