#pragma once

#include <cstddef>
#include <vector>

#include "lacc/complexmat.hpp"

namespace lacc {

// Validated quantum state: Hermitian, unit trace, positive semidefinite
// (within tolerances), with declared party dimensions.
class DensityMatrix {
public:
    // Validates; throws InputError kinds NonHermitian / TraceDeviation /
    // NegativeEigenvalue.  Eigenvalues in (-1e-10, 0) are clamped to zero and
    // the matrix renormalized; matrices already clean at working precision
    // pass through bit-identical (keeps file round-trips exact).
    DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims);

    // Exact-by-construction projector |psi><psi|; skips the eigenvalue scan.
    static DensityMatrix from_pure(const PureState& psi, std::vector<std::size_t> dims);
    static DensityMatrix maximally_mixed(std::vector<std::size_t> dims);

    [[nodiscard]] const ComplexMatrix& matrix() const { return m_; }
    [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
    [[nodiscard]] std::size_t dim() const { return m_.rows(); }

    // Descending, clamped to [0,1].
    [[nodiscard]] std::vector<double> eigenvalues() const;
    [[nodiscard]] EighResult eigh() const;
    [[nodiscard]] double purity() const;  // tr(rho^2)

    // Bipartite reduction; keep is the party index to retain.
    [[nodiscard]] DensityMatrix partial_trace(std::size_t keep) const;

private:
    DensityMatrix() = default;
    std::vector<std::size_t> dims_;
    ComplexMatrix m_;
};

DensityMatrix validate_density_matrix(ComplexMatrix m, std::vector<std::size_t> dims);

struct ConditionalResult {
    double weight = 0.0;      // tr <alpha|sigma|alpha>, in [0,1]
    ComplexMatrix state;      // unit-trace conditional on the other party; zero matrix when weight < 1e-14
    bool defined = false;
};

// Projects the first party of a bipartite sigma onto |alpha>; returns the
// outcome weight and the normalized conditional state of the second party.
ConditionalResult conditional_operator(const ComplexMatrix& sigma,
                                       const std::vector<std::size_t>& dims,
                                       const PureState& alpha);

// Reorders a bipartite matrix so the parties swap roles: dims (dA,dB) -> (dB,dA).
ComplexMatrix swap_parties(const ComplexMatrix& m, const std::vector<std::size_t>& dims);

}
