#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lacc/densmat.hpp"
#include "lacc/ensembles.hpp"

namespace lacc {

enum class Method { quadrature, monte_carlo };

std::string method_name(Method m);

struct EvalParams {
    Method method = Method::quadrature;
    std::size_t n_theta = 64;    // quadrature: polar nodes
    std::size_t n_phi = 64;      // quadrature: azimuthal nodes
    std::size_t n_samples = 200000;  // monte carlo budget
    std::uint64_t seed = 0;
    int threads = 1;
};

struct BoundReport {
    std::string name;
    double value = 0.0;      // bits
    double std_error = 0.0;  // bits; 0 for deterministic routes
    std::string method;
    nlohmann::json params;
    std::vector<std::string> flags;

    [[nodiscard]] nlohmann::json to_json() const;
};

// chi = S(avg) - sum_x p_x S(rho_x): upper bound on accessible information.
BoundReport holevo_chi(const Ensemble& e);

// lambda = Q(avg) - sum_x p_x Q(rho_x): lower bound on accessible
// information, attained on average by a Haar-random global basis.
BoundReport subentropy_gap(const Ensemble& e);

// chi_L = S(avg_A) + S(avg_B) - max over a party of sum_x p_x S(rho_x
// reduced to that party) - e_out: upper bound on what one-way local
// measurement rounds can extract.
BoundReport local_chi(const Ensemble& e, double e_out = 0.0);

// Q_L(sigma): minus the product-basis average of <ab|sigma|ab> log2 of the
// same, scaled by the total dimension.  The local analogue of subentropy.
BoundReport local_subentropy(const DensityMatrix& state, const EvalParams& params);

// lambda_L = Q_L(avg) - sum_x p_x Q_L(rho_x): average mutual information of
// a Haar-random product basis, and a lower bound on locally accessible
// information when one party is a qubit (flagged "separable-only" otherwise).
BoundReport local_subentropy_gap(const Ensemble& e, const EvalParams& params);

// Alternate evaluation available when the ensemble average is a product
// state: Q(avg_A) + Q(avg_B) + harmonic constant on A, minus the member term
// evaluated over the A-side sphere only.  Cross-checked against the direct
// route; disagreement beyond combined error bars raises
// ConsistencyError("ConsistencyFailure").
BoundReport local_subentropy_gap_product_form(const Ensemble& e, const EvalParams& params);

// Entanglement distillation rate bound for a pure-state decomposition taken
// m copies at a time, with the A side compressed to a qubit by the given
// 2 x dA^m isometry: S(avg_A) + S(avg_B) - mean member marginal entropy -
// lambda_L(projected m-copy ensemble) / m.
BoundReport distillation_bound(const PureDecomposition& d, std::size_t m,
                               const ComplexMatrix& isometry, const EvalParams& params);

struct HashingCheck {
    double bound = 0.0;      // one-copy distillation bound
    double std_error = 0.0;
    double yield = 0.0;      // hashing rate 1 - S(avg)
    bool compatible = false; // bound >= yield within error bars
};

// For Bell-diagonal decompositions the m = 1 bound must not undercut the
// hashing rate; throws InputError("NotBellDiagonal") for anything else.
HashingCheck hashing_compatibility_check(const PureDecomposition& d, const EvalParams& params);

}
