#pragma once

#include <cstddef>
#include <vector>

#include "lacc/complexmat.hpp"
#include "lacc/ensembles.hpp"
#include "lacc/rng.hpp"

namespace lacc {

struct BasisAverage {
    double mean = 0.0;       // bits
    double std_error = 0.0;
    std::size_t n_bases = 0;
};

// Mean I_M over Haar-random complete orthogonal product bases: the
// brute-force estimator that the analytic lambda_L must reproduce.
BasisAverage average_product_basis_mi(const Ensemble& e, std::size_t n_bases, const Rng& rng,
                                      int threads = 1);

// Unitary assembled from a lexicographic chain of two-level rotations, two
// angles (mixing, phase) per index pair: dim(dim-1) angles total.  Column
// phases are irrelevant to any projective measurement built from it.
ComplexMatrix givens_unitary(std::size_t dim, const std::vector<double>& angles);

// Alice measures a fixed qubit basis, Bob measures a basis chosen by her
// outcome; the classic realization of a complete product measurement by LOCC.
struct TwoStepProtocol {
    double alice_theta = 0.0;
    double alice_phi = 0.0;
    std::vector<double> bob_angles;  // d_B(d_B-1) angles per Alice outcome, concatenated

    [[nodiscard]] std::vector<PureState> alice_basis() const;
};

TwoStepProtocol unpack_two_step(const std::vector<double>& params, std::size_t d_b);

double two_step_mutual_information(const Ensemble& e, const TwoStepProtocol& p);

struct OptimizationResult {
    double value = 0.0;          // bits; achievable, so a certified lower bound
    std::vector<double> params;  // angle vector at the best point found
    std::size_t evals_used = 0;
    std::size_t restarts_used = 0;
    bool converged = false;      // false when the eval budget truncated any restart
};

// Pattern search over all protocol angles from 32 restarts (half seeded on a
// deterministic Alice-angle grid).  Returns best-so-far when the budget runs
// out; never throws for exhaustion.
OptimizationResult optimize_two_step_locc(const Ensemble& e, std::size_t budget, const Rng& rng);

// Unrestricted orthonormal-basis search for total dimension <= 16.
OptimizationResult optimize_global_orthogonal(const Ensemble& e, std::size_t budget, const Rng& rng);

}
