#pragma once

#include <cstddef>
#include <vector>

#include "lacc/complexmat.hpp"
#include "lacc/densmat.hpp"

namespace lacc {

struct Ensemble;

// -sum p log2 p with 0 log 0 := 0.  Entries may arrive in any order.
double shannon_entropy(const std::vector<double>& p);
double binary_entropy(double p);

double von_neumann_entropy(const DensityMatrix& rho);

// Subentropy Q of a spectrum, evaluated as minus the Newton divided
// difference of g(x) = x^d log2 x over the d eigenvalue nodes.  Nodes closer
// than 1e-9 are merged into confluent (derivative) entries, which is what
// keeps the value finite through degeneracies; the textbook product formula
// cancels catastrophically there.
double subentropy(const std::vector<double>& spectrum);

// The product-form evaluation, valid only for pairwise-separated spectra.
// Kept as an independent cross-check of the divided-difference scheme.
double subentropy_direct(const std::vector<double>& spectrum);

// log2(e) * (1/2 + 1/3 + ... + 1/n); 0 for n <= 1.
double harmonic_log_constant(std::size_t n);

// Joint distribution p(x, outcome) of ensemble label vs measurement outcome.
struct OutcomeTable {
    std::vector<std::vector<double>> joint;  // joint[x][y]

    // H(outcomes) - sum_x p_x H(outcomes | x), in bits
    [[nodiscard]] double mutual_information() const;
};

OutcomeTable outcome_table(const Ensemble& e, const std::vector<PureState>& basis);

// I_M of a complete orthonormal measurement applied to an ensemble.
// Throws IncompleteBasis / NonOrthonormal on a bad basis.
double mutual_information_of_basis(const Ensemble& e, const std::vector<PureState>& basis);

}
